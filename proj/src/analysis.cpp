#include "insider/analysis.hpp"

#include "insider/bsde.hpp"
#include "insider/error.hpp"
#include "insider/paths.hpp"
#include "insider/strategies.hpp"

#include <cmath>

namespace insider {

namespace {

void require_small_trader(const MarketParams& market) {
    for (double v : market.varrho.values())
        if (v != 0.0) fail(ErrorKind::Domain, "requires_small_trader", "this value formula requires varrho = 0");
}

void require_unit_insider(const MarketParams& market, const InsiderSpec& insider) {
    if (!insider.enlarged())
        fail(ErrorKind::Domain, "requires_enlargement", "insider value needs an enlarged filtration");
    if (!(insider.T0 > market.T)) fail(ErrorKind::Domain, "t0_not_after_t", "T0 must exceed T");
    if (!insider.unit_weight())
        fail(ErrorKind::Domain, "unsupported_phi", "closed form available for unit weight only");
}

double base_value(const MarketParams& market) { return std::log(market.X0) + market.r.integral(0.0, market.T); }

void finish(ValueBreakdown& v) { v.total = v.base + v.merton + v.rent + v.penalty_adjust; }

double merton_term(const MarketParams& market) {
    return 0.5 * integrate_segments(market, 0.0, market.T, [&](double t) {
               const double io = iota(market, t);
               return market.sigma(t) / sigma_tilde(market, t) * io * io;
           });
}

MarketParams without_impact(MarketParams m) {
    m.varrho = PiecewiseConstant(0.0);
    return m;
}

} // namespace

double integral_iota(const MarketParams& market) {
    return integrate_segments(market, 0.0, market.T, [&](double t) { return iota(market, t); });
}

double integral_iota_sq(const MarketParams& market) {
    return integrate_segments(market, 0.0, market.T, [&](double t) {
        const double io = iota(market, t);
        return io * io;
    });
}

ValueBreakdown value_no_insider_robust(const MarketParams& market) {
    require_small_trader(market);
    ValueBreakdown v;
    v.base = base_value(market);
    const double i2 = integral_iota_sq(market);
    v.merton = 0.5 * i2;
    v.penalty_adjust = -0.25 * i2;
    finish(v);
    return v;
}

ValueBreakdown value_no_insider_nonrobust(const MarketParams& market) {
    ValueBreakdown v;
    v.base = base_value(market);
    v.merton = merton_term(market);
    finish(v);
    return v;
}

ValueBreakdown value_small_insider_robust(const MarketParams& market, const InsiderSpec& insider) {
    require_small_trader(market);
    require_unit_insider(market, insider);
    ValueBreakdown v = value_no_insider_robust(market);
    const double T = market.T, a = 2.0 * insider.T0 - T, I = integral_iota(market);
    v.rent = 0.5 * std::log(a * a / (a * a - T * T)) + T / (2.0 * a) + I * I / (4.0 * a);
    finish(v);
    return v;
}

ValueBreakdown value_large_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider) {
    require_unit_insider(market, insider);
    ValueBreakdown v = value_no_insider_nonrobust(market);
    // 1/2 int k / (T0 - t) with k = sigma / sigma_tilde piecewise constant.
    const double T0 = insider.T0;
    std::vector<double> cuts{0.0};
    for (double b : market.breakpoints()) cuts.push_back(b);
    cuts.push_back(market.T);
    double rent = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double k = market.sigma(cuts[j]) / sigma_tilde(market, cuts[j]);
        rent += k * std::log((T0 - cuts[j]) / (T0 - cuts[j + 1]));
    }
    v.rent = 0.5 * rent;
    finish(v);
    return v;
}

ValueBreakdown value_small_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider) {
    return value_large_insider_nonrobust(without_impact(market), insider);
}

double critical_gap(const MarketParams& market, double T0) {
    const MarketParams m = without_impact(market);
    InsiderSpec ins;
    ins.kind = InsiderKind::InitialEnlargement;
    ins.T0 = T0;
    return value_small_insider_robust(m, ins).total - value_no_insider_nonrobust(m).total;
}

double critical_T0(const MarketParams& market, Bracket bracket, double tol) {
    const double T = market.T;
    double lo = bracket.low > 0.0 ? bracket.low : T * (1.0 + 1e-9);
    double hi = bracket.high > 0.0 ? bracket.high : 1e4 * T;
    if (!(lo > T) || !(hi > lo)) fail(ErrorKind::Validation, "bracket_invalid", "need T < low < high");
    double flo = critical_gap(market, lo), fhi = critical_gap(market, hi);
    if (!(flo > 0.0 && fhi < 0.0))
        fail(ErrorKind::NonConvergence, "bracket_not_straddling",
             "critical T0 bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                 "] does not straddle a root (gap " + std::to_string(flo) + " .. " + std::to_string(fhi) + ")");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = critical_gap(market, mid);
        if (f == 0.0 || hi - lo <= 1e-13 * hi) return mid;
        (f > 0.0 ? lo : hi) = mid;
    }
    const double mid = 0.5 * (lo + hi);
    if (std::abs(critical_gap(market, mid)) > tol)
        fail(ErrorKind::NonConvergence, "bisection_not_converged", "critical T0 bisection did not converge");
    return mid;
}

std::string to_string(FigureKind kind) {
    switch (kind) {
    case FigureKind::Fig1: return "fig1";
    case FigureKind::Fig2: return "fig2";
    case FigureKind::Fig3: return "fig3";
    case FigureKind::StrategyLines: return "strategy_lines";
    }
    return "?";
}

FigureKind figure_kind_from_string(const std::string& s) {
    for (auto k : {FigureKind::Fig1, FigureKind::Fig2, FigureKind::Fig3, FigureKind::StrategyLines})
        if (to_string(k) == s) return k;
    fail(ErrorKind::Validation, "unknown_figure", "unknown figure kind: " + s);
}

namespace {

Table value_curves(const MarketParams& market, const FigureSweep& sweep) {
    const MarketParams small = without_impact(market);
    MarketParams large = market;
    large.varrho = PiecewiseConstant(sweep.large_varrho_factor * market.sigma(0.0) * market.sigma(0.0));
    if (!large.sigma.is_constant())
        fail(ErrorKind::Domain, "requires_constant_parameters", "figure sweeps need constant sigma");
    const double lnX0 = std::log(market.X0);

    Table tab;
    tab.header = {"T0", "small_robust", "small_nonrobust", "large_robust", "large_robust_se", "large_nonrobust",
                  "no_insider_robust", "no_insider_nonrobust", "no_insider_large_nonrobust"};
    const double nir = value_no_insider_robust(small).total - lnX0;
    const double ninr = value_no_insider_nonrobust(small).total - lnX0;
    const double nilnr = value_no_insider_nonrobust(large).total - lnX0;
    for (double T0 : sweep.T0s) {
        InsiderSpec ins;
        ins.kind = InsiderKind::InitialEnlargement;
        ins.T0 = T0;
        double lr = NAN, lr_se = NAN;
        if (sweep.include_bsde) {
            ScenarioConfig cfg;
            cfg.market = large;
            cfg.insider = ins;
            cfg.n_steps = sweep.bsde_steps;
            cfg.n_paths = sweep.bsde_paths;
            cfg.seed = sweep.seed;
            validate(cfg);
            const PathBatch batch = sample_paths(cfg);
            const BsdeSolution sol = solve_quadratic_lsmc(batch, large, ins, lnX0);
            const SampleStats v = value_from_bsde(sol);
            lr = v.mean - lnX0;
            lr_se = v.std_error;
        }
        tab.rows.push_back({T0, value_small_insider_robust(small, ins).total - lnX0,
                            value_small_insider_nonrobust(small, ins).total - lnX0, lr, lr_se,
                            value_large_insider_nonrobust(large, ins).total - lnX0, nir, ninr, nilnr});
    }
    return tab;
}

Table critical_grid(const MarketParams& market, const FigureSweep& sweep) {
    Table tab;
    tab.header = {"mu", "sigma", "T0_star"};
    for (double mu : sweep.mus)
        for (double sigma : sweep.sigmas) {
            MarketParams m = market;
            m.mu0 = PiecewiseConstant(mu);
            m.sigma = PiecewiseConstant(sigma);
            tab.rows.push_back({mu, sigma, critical_T0(m)});
        }
    return tab;
}

Table strategy_lines(const MarketParams& market, const FigureSweep& sweep) {
    const MarketParams small = without_impact(market);
    MarketParams large = market;
    large.varrho = PiecewiseConstant(sweep.large_varrho_factor * market.sigma(0.0) * market.sigma(0.0));
    InsiderSpec ins;
    ins.kind = InsiderKind::InitialEnlargement;
    ins.T0 = sweep.strategy_T0;
    const double t = sweep.strategy_t_frac * market.T;
    const double h = sweep.fd_step;

    auto state = [&](double w) {
        PathState s;
        s.W_t = w;
        s.B_t = w;
        s.Y0 = sweep.strategy_W_T0;
        s.W_T0 = sweep.strategy_W_T0;
        s.phi = information_drift_at(ins, s.Y0, s.B_t, t);
        return s;
    };
    auto sr = [&](double w) { return pi_small_insider_robust(small, ins, state(w), t); };
    auto sn = [&](double w) { return pi_small_insider_nonrobust(small, state(w), t); };
    auto ln = [&](double w) { return pi_large_insider_nonrobust(large, ins, state(w), t); };
    auto fd = [&](auto&& f, double w) { return (f(w + h) - f(w - h)) / (2.0 * h); };

    Table tab;
    tab.header = {"W_t",
                  "pi_small_robust",
                  "pi_small_nonrobust",
                  "pi_large_nonrobust",
                  "pi_no_insider_robust",
                  "pi_no_insider_nonrobust",
                  "slope_small_robust",
                  "fd_slope_small_robust",
                  "slope_small_nonrobust",
                  "fd_slope_small_nonrobust",
                  "slope_large_nonrobust",
                  "fd_slope_large_nonrobust"};
    for (double w : sweep.strategy_W)
        tab.rows.push_back({w, sr(w), sn(w), ln(w), pi_no_insider_robust(small, t), pi_no_insider_nonrobust(small, t),
                            slope_small_insider_robust(small, ins, t), fd(sr, w),
                            slope_small_insider_nonrobust(small, ins, t), fd(sn, w),
                            slope_large_insider_nonrobust(large, ins, t), fd(ln, w)});
    return tab;
}

} // namespace

Table figure_data(FigureKind kind, const MarketParams& market, const FigureSweep& sweep) {
    switch (kind) {
    case FigureKind::Fig1:
    case FigureKind::Fig3: return value_curves(market, sweep);
    case FigureKind::Fig2: return critical_grid(market, sweep);
    case FigureKind::StrategyLines: return strategy_lines(market, sweep);
    }
    return {};
}

} // namespace insider
