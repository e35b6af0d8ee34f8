#include "insider/simulate.hpp"

#include "insider/error.hpp"
#include "insider/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace insider {

namespace {

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
    if (!(a == b)) fail(ErrorKind::GridMismatch, "grid_mismatch", "inputs were built on different grids");
}

struct Coeffs {
    std::vector<double> r, mu0, sigma, varrho, dt;
};

Coeffs coefficients(const TimeGrid& grid, const MarketParams& market) {
    Coeffs c;
    for (std::size_t i = 0; i < grid.steps_to_T(); ++i) {
        const double t = grid.t(i);
        c.r.push_back(market.r(t));
        c.mu0.push_back(market.mu0(t));
        c.sigma.push_back(market.sigma(t));
        c.varrho.push_back(market.varrho(t));
        c.dt.push_back(grid.dt(i));
    }
    return c;
}

} // namespace

WealthPath simulate_wealth(const PathBatch& batch, const StrategyProfile& profile, const MarketParams& market) {
    require_same_grid(batch.grid, profile.grid);
    const Coeffs c = coefficients(batch.grid, market);
    WealthPath w;
    w.grid = batch.grid;
    w.n_paths = batch.n_paths;
    const std::size_t n = batch.steps();
    w.logX.assign(w.n_paths * (n + 1), 0.0);
    const double lnX0 = std::log(market.X0);
    parallel_for(w.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            double* lx = w.logX.data() + p * (n + 1);
            const double* pi = profile.pi.data() + p * n;
            const auto phi = batch.phi_path(p);
            const auto dWH = batch.dWH_path(p);
            lx[0] = lnX0;
            for (std::size_t i = 0; i < n; ++i) {
                const double sp = c.sigma[i] * pi[i];
                const double drift = c.r[i] + (c.mu0[i] + c.varrho[i] * pi[i] - c.r[i]) * pi[i] + sp * phi[i] -
                                     0.5 * sp * sp;
                lx[i + 1] = lx[i] + drift * c.dt[i] + sp * dWH[i];
            }
        }
    });
    return w;
}

DensityPath simulate_density(const PathBatch& batch, const StrategyProfile& profile) {
    require_same_grid(batch.grid, profile.grid);
    DensityPath d;
    d.grid = batch.grid;
    d.n_paths = batch.n_paths;
    const std::size_t n = batch.steps();
    d.logE.assign(d.n_paths * (n + 1), 0.0);
    parallel_for(d.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            double* le = d.logE.data() + p * (n + 1);
            const double* th = profile.theta.data() + p * n;
            const auto dWH = batch.dWH_path(p);
            for (std::size_t i = 0; i < n; ++i)
                le[i + 1] = le[i] + th[i] * dWH[i] - 0.5 * th[i] * th[i] * batch.grid.dt(i);
        }
    });
    return d;
}

namespace {

double penalty_integral(const StrategyProfile& profile, const DensityPath& density, std::size_t p) {
    const std::size_t n = profile.steps();
    const double* th = profile.theta.data() + p * n;
    const double* le = density.logE.data() + p * (n + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(le[i]) * 0.5 * th[i] * th[i] * profile.grid.dt(i);
    return acc;
}

} // namespace

std::vector<double> j_functional(const PathBatch& batch, const StrategyProfile& profile,
                                 const WealthPath& wealth, const DensityPath& density) {
    require_same_grid(batch.grid, profile.grid);
    require_same_grid(batch.grid, wealth.grid);
    require_same_grid(batch.grid, density.grid);
    std::vector<double> out(batch.n_paths);
    parallel_for(batch.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p)
            out[p] = std::exp(density.terminal(p)) * wealth.terminal(p) + penalty_integral(profile, density, p);
    });
    return out;
}

JEstimate estimate_J(const PathBatch& batch, const StrategyProfile& profile, const WealthPath& wealth,
                     const DensityPath& density) {
    const auto v = j_functional(batch, profile, wealth, density);
    return sample_stats(v);
}

void entropy_functionals(const PathBatch& batch, const StrategyProfile& profile, const DensityPath& density,
                         std::vector<double>& lhs, std::vector<double>& rhs) {
    require_same_grid(batch.grid, profile.grid);
    require_same_grid(batch.grid, density.grid);
    lhs.resize(batch.n_paths);
    rhs.resize(batch.n_paths);
    parallel_for(batch.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const double le = density.terminal(p);
            lhs[p] = std::exp(le) * le;
            rhs[p] = penalty_integral(profile, density, p);
        }
    });
}

EntropyCheck entropy_from_samples(std::span<const double> lhs, std::span<const double> rhs) {
    EntropyCheck e;
    e.lhs = sample_stats(lhs);
    e.rhs = sample_stats(rhs);
    e.gap = e.lhs.mean - e.rhs.mean;
    e.combined_se = std::hypot(e.lhs.std_error, e.rhs.std_error);
    return e;
}

EntropyCheck entropy_identity_check(const PathBatch& batch, const StrategyProfile& profile,
                                    const DensityPath& density) {
    std::vector<double> lhs, rhs;
    entropy_functionals(batch, profile, density, lhs, rhs);
    return entropy_from_samples(lhs, rhs);
}

std::vector<double> default_checkpoints(double T, int intervals) {
    std::vector<double> c;
    for (int k = 0; k <= intervals; ++k) c.push_back(T * k / intervals);
    c.back() = T;
    return c;
}

std::vector<double> martingale_increments(const PathBatch& batch, const StrategyProfile& profile,
                                          const MarketParams& market, const DensityPath& density,
                                          std::span<const double> checkpoints) {
    require_same_grid(batch.grid, profile.grid);
    require_same_grid(batch.grid, density.grid);
    if (checkpoints.size() < 2)
        fail(ErrorKind::Validation, "checkpoints_too_few", "need at least two checkpoints");
    std::vector<std::size_t> idx;
    for (double c : checkpoints) idx.push_back(batch.grid.knot_index(c));
    for (std::size_t k = 1; k < idx.size(); ++k)
        if (idx[k] <= idx[k - 1] || idx[k] > batch.steps())
            fail(ErrorKind::Validation, "checkpoints_not_increasing",
                 "checkpoints must be increasing knots within [0, T]");
    const Coeffs c = coefficients(batch.grid, market);
    const std::size_t n = batch.steps();
    const std::size_t m = idx.size() - 1;
    std::vector<double> out(batch.n_paths * m);
    parallel_for(batch.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const double eT = std::exp(density.terminal(p));
            const double* pi = profile.pi.data() + p * n;
            const auto dW = batch.dW_path(p);
            for (std::size_t k = 0; k < m; ++k) {
                double dm = 0.0;
                for (std::size_t i = idx[k]; i < idx[k + 1]; ++i)
                    dm += (c.mu0[i] + 2.0 * c.varrho[i] * pi[i] - c.r[i] - c.sigma[i] * c.sigma[i] * pi[i]) * c.dt[i] +
                          c.sigma[i] * dW[i];
                out[p * m + k] = eT * dm;
            }
        }
    });
    return out;
}

namespace {

std::vector<MartingaleRow> martingale_rows(std::span<const double> increments, std::size_t n_paths,
                                           std::span<const double> checkpoints) {
    const std::size_t m = checkpoints.size() - 1;
    std::vector<MartingaleRow> rows(m);
    std::vector<double> col(n_paths);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t p = 0; p < n_paths; ++p) col[p] = increments[p * m + k];
        rows[k].t = checkpoints[k];
        rows[k].h = checkpoints[k + 1] - checkpoints[k];
        rows[k].stats = sample_stats(col);
    }
    return rows;
}

} // namespace

std::vector<MartingaleRow> martingale_diagnostic(const PathBatch& batch, const StrategyProfile& profile,
                                                 const MarketParams& market, const DensityPath& density,
                                                 std::span<const double> checkpoints) {
    const auto inc = martingale_increments(batch, profile, market, density, checkpoints);
    return martingale_rows(inc, batch.n_paths, checkpoints);
}

McResult run_monte_carlo(const ScenarioConfig& config, StrategyKind kind, const McOptions& options) {
    validate(config);
    if (options.chunk == 0) fail(ErrorKind::Validation, "chunk_zero", "chunk size must be positive");
    const auto total = static_cast<std::size_t>(config.n_paths);
    const std::size_t m = options.checkpoints.empty() ? 0 : options.checkpoints.size() - 1;
    std::vector<double> J(total), lnXT(total), epsT(total), lhs(total), rhs(total), mart(total * m);

    for (std::size_t first = 0; first < total; first += options.chunk) {
        const std::size_t count = std::min(options.chunk, total - first);
        const PathBatch batch = sample_paths(config, first, count);
        StrategyProfile prof = build_profile(kind, batch, config.market, config.insider);
        for (double& x : prof.pi) x *= options.pi_scale;
        for (double& x : prof.theta) x *= options.theta_scale;
        const WealthPath wealth = simulate_wealth(batch, prof, config.market);
        const DensityPath density = simulate_density(batch, prof);
        const auto j = j_functional(batch, prof, wealth, density);
        std::vector<double> l, r;
        entropy_functionals(batch, prof, density, l, r);
        for (std::size_t p = 0; p < count; ++p) {
            J[first + p] = j[p];
            lnXT[first + p] = wealth.terminal(p);
            epsT[first + p] = std::exp(density.terminal(p));
            lhs[first + p] = l[p];
            rhs[first + p] = r[p];
        }
        if (m > 0) {
            const auto inc = martingale_increments(batch, prof, config.market, density, options.checkpoints);
            std::copy(inc.begin(), inc.end(), mart.begin() + static_cast<std::ptrdiff_t>(first * m));
        }
    }

    McResult res;
    res.kind = kind;
    res.n_paths = total;
    res.J = sample_stats(J);
    res.lnXT = sample_stats(lnXT);
    res.epsT = sample_stats(epsT);
    res.entropy = entropy_from_samples(lhs, rhs);
    if (m > 0) res.martingale = martingale_rows(mart, total, options.checkpoints);
    return res;
}

} // namespace insider
