#include "insider/strategies.hpp"

#include "insider/error.hpp"
#include "insider/parallel.hpp"

#include <algorithm>
#include <array>

namespace insider {

namespace {

constexpr std::array<std::pair<StrategyKind, const char*>, 6> kNames{{
    {StrategyKind::NoInsiderRobust, "NoInsiderRobust"},
    {StrategyKind::NoInsiderNonRobust, "NoInsiderNonRobust"},
    {StrategyKind::SmallInsiderRobust, "SmallInsiderRobust"},
    {StrategyKind::SmallInsiderNonRobust, "SmallInsiderNonRobust"},
    {StrategyKind::LargeInsiderNonRobust, "LargeInsiderNonRobust"},
    {StrategyKind::LargeInsiderRobust, "LargeInsiderRobust"},
}};

void require_small_trader(const MarketParams& market, double t) {
    if (market.varrho(t) != 0.0)
        fail(ErrorKind::Domain, "requires_small_trader", "this closed form requires varrho = 0");
}

void require_before_T(const MarketParams& market, double t) {
    if (!(t >= 0.0 && t < market.T))
        fail(ErrorKind::Domain, "time_out_of_range", "strategy evaluation needs t in [0, T)");
}

void require_enlarged(const InsiderSpec& insider) {
    if (!insider.enlarged())
        fail(ErrorKind::Domain, "requires_enlargement", "insider regime needs an enlarged filtration");
}

void require_unit_weight(const InsiderSpec& insider) {
    require_enlarged(insider);
    if (!insider.unit_weight())
        fail(ErrorKind::Domain, "unsupported_phi", "closed form available for unit weight only");
}

} // namespace

std::string to_string(StrategyKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "?";
}

StrategyKind strategy_kind_from_string(const std::string& s) {
    for (const auto& [k, name] : kNames)
        if (s == name) return k;
    fail(ErrorKind::Validation, "unknown_strategy_kind", "unknown strategy kind: " + s);
}

bool is_robust(StrategyKind kind) {
    return kind == StrategyKind::NoInsiderRobust || kind == StrategyKind::SmallInsiderRobust ||
           kind == StrategyKind::LargeInsiderRobust;
}

bool needs_enlargement(StrategyKind kind) {
    return kind == StrategyKind::SmallInsiderRobust || kind == StrategyKind::SmallInsiderNonRobust ||
           kind == StrategyKind::LargeInsiderNonRobust;
}

double pi_no_insider_robust(const MarketParams& market, double t) {
    require_small_trader(market, t);
    return iota(market, t) / (2.0 * market.sigma(t));
}

double theta_no_insider_robust(const MarketParams& market, double t) {
    require_small_trader(market, t);
    return -0.5 * iota(market, t);
}

double pi_no_insider_nonrobust(const MarketParams& market, double t) {
    return iota(market, t) / sigma_tilde(market, t);
}

double integral_phi_iota(const MarketParams& market, const InsiderSpec& insider, double a, double b) {
    if (a > b) fail(ErrorKind::Domain, "interval_reversed", "integral needs a <= b");
    std::vector<double> cuts = market.breakpoints();
    for (double s : insider.phi_weight.starts()) cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0, lo = a;
    for (double c : cuts) {
        if (c <= lo) continue;
        if (c >= b) break;
        total += insider.phi_weight(lo) * iota(market, lo) * (c - lo);
        lo = c;
    }
    if (b > lo) total += insider.phi_weight(lo) * iota(market, lo) * (b - lo);
    return total;
}

namespace {

// Common signal term of the small robust insider: phi_t (Y0 - B_t + 1/2 int phi iota) / (norms).
double small_signal(const MarketParams& market, const InsiderSpec& insider, const PathState& s, double t) {
    const double denom = phi_norm_sq(insider, t, insider.T0) + phi_norm_sq(insider, market.T, insider.T0);
    return insider.phi_weight(t) * (s.Y0 - s.B_t + 0.5 * integral_phi_iota(market, insider, t, market.T)) /
           denom;
}

} // namespace

double pi_small_insider_robust(const MarketParams& market, const InsiderSpec& insider,
                               const PathState& s, double t) {
    require_before_T(market, t);
    require_small_trader(market, t);
    require_enlarged(insider);
    const double sigma = market.sigma(t);
    return iota(market, t) / (2.0 * sigma) + small_signal(market, insider, s, t) / sigma;
}

double theta_small_insider_robust(const MarketParams& market, const InsiderSpec& insider,
                                  const PathState& s, double t) {
    require_before_T(market, t);
    require_small_trader(market, t);
    require_enlarged(insider);
    const double drift = insider.phi_weight(t) * (s.Y0 - s.B_t) / phi_norm_sq(insider, t, insider.T0);
    return -0.5 * iota(market, t) + small_signal(market, insider, s, t) - drift;
}

double pi_small_insider_nonrobust(const MarketParams& market, const PathState& s, double t) {
    require_before_T(market, t);
    require_small_trader(market, t);
    return (iota(market, t) + s.phi) / market.sigma(t);
}

double pi_large_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider,
                                  const PathState& s, double t) {
    require_before_T(market, t);
    require_unit_weight(insider);
    const double st = sigma_tilde(market, t);
    return iota(market, t) / st + (s.W_T0 - s.W_t) / (st * (insider.T0 - t));
}

double theta_from_pi(const MarketParams& market, double phi, double pi, double t) {
    return sigma_tilde(market, t) * pi - (iota(market, t) + phi);
}

double slope_small_insider_robust(const MarketParams& market, const InsiderSpec& insider, double t) {
    require_before_T(market, t);
    require_unit_weight(insider);
    return -1.0 / (market.sigma(t) * (2.0 * insider.T0 - t - market.T));
}

double slope_large_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider, double t) {
    require_before_T(market, t);
    require_unit_weight(insider);
    return -1.0 / (sigma_tilde(market, t) * (insider.T0 - t));
}

double slope_small_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider, double t) {
    require_before_T(market, t);
    require_unit_weight(insider);
    return -1.0 / (market.sigma(t) * (insider.T0 - t));
}

PathState path_state(const PathBatch& batch, std::size_t p, std::size_t i) {
    PathState s;
    s.W_t = batch.W_path(p)[i];
    s.B_t = batch.B_path(p)[i];
    s.Y0 = batch.Y0[p];
    s.W_T0 = batch.W_T0[p];
    s.phi = i < batch.steps() ? batch.phi_path(p)[i] : 0.0;
    return s;
}

StrategyProfile build_profile(StrategyKind kind, const PathBatch& batch, const MarketParams& market,
                              const InsiderSpec& insider) {
    if (kind == StrategyKind::LargeInsiderRobust)
        fail(ErrorKind::Domain, "no_closed_form",
             "LargeInsiderRobust has no closed form; solve the quadratic BSDE instead");
    if (needs_enlargement(kind)) require_enlarged(insider);
    StrategyProfile prof;
    prof.kind = kind;
    prof.grid = batch.grid;
    prof.n_paths = batch.n_paths;
    const std::size_t n = batch.steps();
    prof.pi.assign(prof.n_paths * n, 0.0);
    prof.theta.assign(prof.n_paths * n, 0.0);
    parallel_for(prof.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            for (std::size_t i = 0; i < n; ++i) {
                const double t = batch.grid.t(i);
                const PathState s = path_state(batch, p, i);
                double& pi = prof.pi[p * n + i];
                double& th = prof.theta[p * n + i];
                switch (kind) {
                case StrategyKind::NoInsiderRobust:
                    pi = pi_no_insider_robust(market, t);
                    th = theta_no_insider_robust(market, t);
                    break;
                case StrategyKind::NoInsiderNonRobust:
                    pi = pi_no_insider_nonrobust(market, t);
                    break;
                case StrategyKind::SmallInsiderRobust:
                    pi = pi_small_insider_robust(market, insider, s, t);
                    th = theta_small_insider_robust(market, insider, s, t);
                    break;
                case StrategyKind::SmallInsiderNonRobust:
                    pi = pi_small_insider_nonrobust(market, s, t);
                    break;
                case StrategyKind::LargeInsiderNonRobust:
                    pi = pi_large_insider_nonrobust(market, insider, s, t);
                    break;
                case StrategyKind::LargeInsiderRobust:
                    break;
                }
            }
        }
    });
    return prof;
}

} // namespace insider
