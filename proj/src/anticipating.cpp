#include "insider/anticipating.hpp"

#include "insider/error.hpp"
#include "insider/parallel.hpp"
#include "insider/rng.hpp"
#include "insider/stats.hpp"

#include <cmath>

namespace insider {

std::string to_string(TestIntegrand u) {
    switch (u) {
    case TestIntegrand::WT: return "WT";
    case TestIntegrand::WTSquared: return "WT_squared";
    case TestIntegrand::AdaptedConstVol: return "AdaptedConstVol";
    }
    return "?";
}

TestIntegrand test_integrand_from_string(const std::string& s) {
    if (s == "WT") return TestIntegrand::WT;
    if (s == "WT_squared") return TestIntegrand::WTSquared;
    if (s == "AdaptedConstVol") return TestIntegrand::AdaptedConstVol;
    fail(ErrorKind::Validation, "unknown_integrand", "unknown test integrand: " + s);
}

std::vector<FinePath> fine_paths(std::uint64_t seed, std::size_t n_paths, std::size_t n_steps, double T) {
    if (n_steps < 2) fail(ErrorKind::Validation, "n_steps_too_small", "n_steps must be >= 2");
    if (!(T > 0.0)) fail(ErrorKind::Validation, "horizon_nonpositive", "T must be positive");
    std::vector<FinePath> out(n_paths);
    const double sq = std::sqrt(T / static_cast<double>(n_steps));
    parallel_for(n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const NormalStream z(seed, p);
            FinePath& fp = out[p];
            fp.T = T;
            fp.W.assign(n_steps + 1, 0.0);
            for (std::size_t i = 0; i < n_steps; ++i) fp.W[i + 1] = fp.W[i] + sq * z(i);
        }
    });
    return out;
}

std::size_t eps_multiple(const FinePath& path, double eps) {
    const double ratio = eps / path.dt();
    const double k = std::round(ratio);
    if (!(k >= 2.0) || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio))
        fail(ErrorKind::Domain, "eps_below_resolution", "eps must be an integer multiple >= 2 of the grid step");
    return static_cast<std::size_t>(k);
}

namespace {

std::size_t knot_of(const FinePath& path, double t) {
    const double r = t / path.dt();
    const double k = std::round(r);
    if (t < 0.0 || t > path.T * (1.0 + 1e-12) || std::abs(r - k) > 1e-9 * std::max(1.0, r))
        fail(ErrorKind::Domain, "time_out_of_range", "t must be a grid knot in [0, T]");
    return static_cast<std::size_t>(k);
}

double power_of_WT(const FinePath& path, TestIntegrand u, double c) {
    switch (u) {
    case TestIntegrand::WT: return path.W_T();
    case TestIntegrand::WTSquared: return path.W_T() * path.W_T();
    case TestIntegrand::AdaptedConstVol: return c;
    }
    return 0.0;
}

} // namespace

double forward_riemann(const FinePath& path, std::span<const double> u, double t, double eps) {
    if (u.size() != path.W.size())
        fail(ErrorKind::GridMismatch, "integrand_length", "integrand must have one value per knot");
    const std::size_t k = eps_multiple(path, eps);
    const std::size_t m = knot_of(path, t);
    const std::size_t n = path.steps();
    CompensatedSum acc;
    for (std::size_t i = 0; i < m; ++i) acc.add(u[i] * (path.W[std::min(i + k, n)] - path.W[i]));
    return acc.value() * path.dt() / eps;
}

double forward_riemann(const FinePath& path, TestIntegrand u, double t, double eps, double c) {
    const std::vector<double> vals(path.W.size(), power_of_WT(path, u, c));
    return forward_riemann(path, vals, t, eps);
}

double forward_oracle(const FinePath& path, TestIntegrand u, double t, double c) {
    return power_of_WT(path, u, c) * path.W[knot_of(path, t)];
}

double ito_residual(const FinePath& path, TestIntegrand u, double t, double eps, double c) {
    // X_s = U W_s with U constant in s, so X u = U^2 W_s and u^2 = U^2.
    const double U = power_of_WT(path, u, c);
    const std::size_t m = knot_of(path, t);
    std::vector<double> xu(path.W.size());
    for (std::size_t i = 0; i < xu.size(); ++i) xu[i] = U * U * path.W[i];
    const double X_t = U * path.W[m];
    return X_t * X_t - 2.0 * forward_riemann(path, xu, t, eps) - U * U * t;
}

std::vector<ConvergenceRow> convergence_table(const std::vector<FinePath>& paths, TestIntegrand u, double t,
                                              std::span<const double> eps_levels, double c) {
    std::vector<ConvergenceRow> rows;
    const std::size_t N = paths.size();
    std::vector<double> err(N), ref(N), ito(N);
    for (double eps : eps_levels) {
        parallel_for(N, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t p = lo; p < hi; ++p) {
                const double o = forward_oracle(paths[p], u, t, c);
                const double e = forward_riemann(paths[p], u, t, eps, c) - o;
                err[p] = e * e;
                ref[p] = o * o;
                const double r = ito_residual(paths[p], u, t, eps, c);
                ito[p] = r * r;
            }
        });
        const double mse = sample_stats(err).mean, msr = sample_stats(ref).mean;
        ConvergenceRow row;
        row.eps = eps;
        row.rms_error = std::sqrt(mse);
        row.rel_rms = msr > 0.0 ? std::sqrt(mse / msr) : 0.0;
        row.ito_rms = std::sqrt(sample_stats(ito).mean);
        rows.push_back(row);
    }
    return rows;
}

} // namespace insider
