#include "insider/bsde.hpp"

#include "insider/error.hpp"
#include "insider/parallel.hpp"
#include "insider/regression.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace insider {

namespace {

struct StepCoeffs {
    std::vector<double> r, sigma, sigma_tilde, iota, dt;
};

StepCoeffs step_coeffs(const TimeGrid& grid, const MarketParams& market) {
    StepCoeffs c;
    for (std::size_t i = 0; i < grid.steps_to_T(); ++i) {
        const double t = grid.t(i);
        c.r.push_back(market.r(t));
        c.sigma.push_back(market.sigma(t));
        c.sigma_tilde.push_back(sigma_tilde(market, t));
        c.iota.push_back(iota(market, t));
        c.dt.push_back(grid.dt(i));
    }
    return c;
}

bool has_signal(const PathBatch& batch) {
    return std::any_of(batch.phi_drift.begin(), batch.phi_drift.end(), [](double x) { return x != 0.0; });
}

// Markov state at knot i: (W_t) without signal, (B_t, Y0) with it.
struct StateColumns {
    std::vector<double> a, b;
    std::vector<std::span<const double>> vars;
};

StateColumns state_at(const PathBatch& batch, std::size_t i, bool enlarged) {
    StateColumns s;
    const std::size_t N = batch.n_paths;
    s.a.resize(N);
    for (std::size_t p = 0; p < N; ++p) s.a[p] = enlarged ? batch.B_path(p)[i] : batch.W_path(p)[i];
    s.vars.emplace_back(s.a);
    if (enlarged) s.vars.emplace_back(batch.Y0);
    return s;
}

std::size_t require_knot_before_T(const TimeGrid& grid, double t) {
    const std::size_t i = grid.knot_index(t);
    if (i > grid.steps_to_T()) fail(ErrorKind::Domain, "time_out_of_range", "time beyond T");
    return i;
}

void require_constant(const MarketParams& market) {
    if (!market.is_constant())
        fail(ErrorKind::Domain, "requires_constant_parameters", "closed form needs constant coefficients");
}

} // namespace

std::vector<double> log_pi_star(const PathBatch& batch, const MarketParams& market, double t1, double t2) {
    if (t1 > t2) fail(ErrorKind::Domain, "interval_reversed", "Pi*(t1, t2) needs t1 <= t2");
    const std::size_t i1 = require_knot_before_T(batch.grid, t1);
    const std::size_t i2 = require_knot_before_T(batch.grid, t2);
    const StepCoeffs c = step_coeffs(batch.grid, market);
    std::vector<double> out(batch.n_paths, 0.0);
    parallel_for(batch.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const auto phi = batch.phi_path(p);
            const auto dWH = batch.dWH_path(p);
            double acc = 0.0;
            for (std::size_t i = i1; i < i2; ++i) {
                const double ft = c.iota[i] + phi[i];
                acc += -c.r[i] * c.dt[i] - ft * dWH[i] - 0.5 * ft * ft * c.dt[i];
            }
            out[p] = acc;
        }
    });
    return out;
}

std::vector<double> pi_star_functional(const PathBatch& batch, const MarketParams& market, double t1, double t2) {
    auto v = log_pi_star(batch, market, t1, t2);
    for (double& x : v) x = std::exp(x);
    return v;
}

namespace {

// ln E[sqrt(Pi*(t, T)) | W_t = w, Y0 = y] for unit weight and constant coefficients.
double log_g(const MarketParams& market, const InsiderSpec& insider, double t, double w, double y) {
    const double T = market.T, T0 = insider.T0;
    const double io = iota(market, 0.0), r = market.r(0.0);
    const double s = T - t, tau = T0 - T;
    const double d = y - w;
    return -0.5 * r * s - io * io * s / 8.0 + 0.25 * std::log((T0 - t) / tau) +
           0.5 * std::log(2.0 * tau / (2.0 * tau + s)) - (d + io * s / 2.0) * (d + io * s / 2.0) / (2.0 * (2.0 * tau + s)) +
           d * d / (4.0 * (T0 - t));
}

} // namespace

double log_normalizer(const MarketParams& market, const InsiderSpec& insider, double y) {
    require_constant(market);
    if (!insider.enlarged() || !insider.unit_weight())
        fail(ErrorKind::Domain, "unsupported_phi", "closed form available for unit weight only");
    return log_g(market, insider, 0.0, 0.0, y);
}

BsdeSolution solve_linear_closed_form(const PathBatch& batch, const MarketParams& market,
                                      const InsiderSpec& insider) {
    BsdeSolution sol;
    sol.grid = batch.grid;
    sol.n_paths = batch.n_paths;
    const std::size_t n = batch.steps();
    sol.Y.assign(sol.n_paths * (n + 1), 0.0);
    sol.Z.assign(sol.n_paths * n, 0.0);
    sol.c.assign(sol.n_paths, 0.0);
    const double lnX0 = std::log(market.X0);
    const StepCoeffs c = step_coeffs(batch.grid, market);

    if (!insider.enlarged()) {
        for (std::size_t i = 0; i < n; ++i)
            if (market.varrho(batch.grid.t(i)) != 0.0)
                fail(ErrorKind::Domain, "requires_small_trader", "linear BSDE needs varrho = 0");
        // X_t = X0 exp(int r + 3/8 int iota^2 + 1/2 int iota dW).
        const double norm = std::exp(-0.5 * market.r.integral(0.0, market.T) -
                                     0.125 * integrate_segments(market, 0.0, market.T, [&](double t) {
                                         const double io = iota(market, t);
                                         return io * io;
                                     }));
        parallel_for(sol.n_paths, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t p = lo; p < hi; ++p) {
                const auto dW = batch.dW_path(p);
                double lx = lnX0;
                sol.Y[p * (n + 1)] = market.X0;
                for (std::size_t i = 0; i < n; ++i) {
                    sol.Z[p * n + i] = 0.5 * c.iota[i] * std::exp(lx);
                    lx += (c.r[i] + 0.375 * c.iota[i] * c.iota[i]) * c.dt[i] + 0.5 * c.iota[i] * dW[i];
                    sol.Y[p * (n + 1) + i + 1] = std::exp(lx);
                }
                sol.c[p] = norm;
            }
        });
        return sol;
    }

    require_constant(market);
    if (market.varrho(0.0) != 0.0)
        fail(ErrorKind::Domain, "requires_small_trader", "linear BSDE needs varrho = 0");
    if (!insider.unit_weight())
        fail(ErrorKind::Domain, "unsupported_phi", "closed form available for unit weight only");
    const double T0 = insider.T0, r = market.r(0.0), io = iota(market, 0.0), sigma = market.sigma(0.0);
    parallel_for(sol.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const double y = batch.Y0[p];
            const double lnN = log_g(market, insider, 0.0, 0.0, y);
            sol.c[p] = std::exp(lnN);
            const auto W = batch.W_path(p);
            for (std::size_t i = 0; i <= n; ++i) {
                const double t = batch.grid.t(i), w = W[i];
                const double dlogp = -0.5 * std::log(T0) - y * y / (2.0 * T0) + 0.5 * std::log(T0 - t) +
                                     (y - w) * (y - w) / (2.0 * (T0 - t));
                const double lx = lnX0 + log_g(market, insider, t, w, y) - lnN + 0.5 * r * t + 0.5 * io * w +
                                  0.25 * io * io * t - 0.5 * dlogp;
                const double X = i == 0 ? market.X0 : std::exp(lx);
                sol.Y[p * (n + 1) + i] = X;
                if (i < n) {
                    PathState s;
                    s.W_t = w;
                    s.B_t = w;
                    s.Y0 = y;
                    sol.Z[p * n + i] = sigma * pi_small_insider_robust(market, insider, s, t) * X;
                }
            }
        }
    });
    return sol;
}

BsdeSolution solve_linear_lsmc(const PathBatch& batch, const MarketParams& market, const InsiderSpec& insider,
                               int basis_order, LinearScheme scheme) {
    const bool enlarged = insider.enlarged();
    if (scheme == LinearScheme::Auto) scheme = enlarged ? LinearScheme::LogTransform : LinearScheme::Direct;
    for (std::size_t i = 0; i < batch.steps(); ++i)
        if (market.varrho(batch.grid.t(i)) != 0.0)
            fail(ErrorKind::Domain, "requires_small_trader", "linear BSDE needs varrho = 0");

    BsdeSolution sol;
    sol.grid = batch.grid;
    sol.n_paths = batch.n_paths;
    const std::size_t N = batch.n_paths, n = batch.steps();
    sol.Y.assign(N * (n + 1), 0.0);
    sol.Z.assign(N * n, 0.0);
    sol.c.assign(N, 0.0);
    const StepCoeffs c = step_coeffs(batch.grid, market);
    const auto lnPi = log_pi_star(batch, market, 0.0, market.T);

    std::vector<double> cur(N), next(N), resid(N);
    if (scheme == LinearScheme::Direct) {
        std::vector<double> sqrtPi(N);
        for (std::size_t p = 0; p < N; ++p) sqrtPi[p] = std::exp(0.5 * lnPi[p]);
        if (enlarged) {
            const Regressor reg({std::span<const double>(batch.Y0)}, basis_order);
            sol.c = reg.project(sqrtPi);
            sol.max_condition = reg.condition();
        } else {
            std::fill(sol.c.begin(), sol.c.end(), sample_stats(sqrtPi).mean);
        }
        for (std::size_t p = 0; p < N; ++p) cur[p] = market.X0 / (sol.c[p] * sqrtPi[p]);
    } else {
        for (std::size_t p = 0; p < N; ++p) cur[p] = -0.5 * lnPi[p];
    }
    for (std::size_t p = 0; p < N; ++p) sol.Y[p * (n + 1) + n] = cur[p];

    for (std::size_t i = n; i-- > 0;) {
        const StateColumns st = state_at(batch, i, enlarged);
        const Regressor reg(st.vars, basis_order);
        sol.max_condition = std::max(sol.max_condition, reg.condition());
        const auto fit = reg.project(cur);
        for (std::size_t p = 0; p < N; ++p) resid[p] = (cur[p] - fit[p]) * batch.dWH[p * n + i];
        auto z = reg.project(resid);
        for (double& v : z) v /= c.dt[i];
        for (std::size_t p = 0; p < N; ++p) {
            const double ft = c.iota[i] + batch.phi_drift[p * n + i];
            if (scheme == LinearScheme::Direct)
                next[p] = cur[p] - (c.r[i] * cur[p] + ft * z[p]) * c.dt[i];
            else
                next[p] = cur[p] - (c.r[i] + ft * z[p] - 0.5 * z[p] * z[p]) * c.dt[i];
        }
        cur = reg.project(next);
        for (std::size_t p = 0; p < N; ++p) {
            sol.Y[p * (n + 1) + i] = cur[p];
            sol.Z[p * n + i] = z[p];
        }
    }

    if (scheme == LinearScheme::LogTransform) {
        // U_0(y) is ln of the normalizer; X = X0 exp(U - U_0), Z = zeta X.
        for (std::size_t p = 0; p < N; ++p) {
            const double u0 = sol.Y[p * (n + 1)];
            sol.c[p] = std::exp(u0);
            for (std::size_t i = 0; i <= n; ++i) {
                double& y = sol.Y[p * (n + 1) + i];
                y = market.X0 * std::exp(y - u0);
                if (i < n) sol.Z[p * n + i] *= y;
            }
        }
    }
    for (std::size_t p = 0; p < N; ++p)
        sol.residual = std::max(sol.residual, std::abs(sol.Y[p * (n + 1)] - market.X0));
    return sol;
}

double quadratic_leading_coefficient(double sigma, double sigma_tilde) {
    return 0.25 - (sigma - sigma_tilde) / (4.0 * (sigma + sigma_tilde));
}

double quadratic_driver(double z, double phitilde, double r, double sigma, double sigma_tilde) {
    const double k = (sigma - sigma_tilde) / (4.0 * (sigma + sigma_tilde));
    return z * z / 4.0 - 0.5 * phitilde * z - r - phitilde * phitilde / 4.0 - k * (z + phitilde) * (z + phitilde);
}

namespace {

struct QuadPass {
    std::vector<double> L;  // n_paths x (steps + 1)
    std::vector<double> Z;
    double max_condition = 0.0;
};

QuadPass quadratic_pass(const PathBatch& batch, const StepCoeffs& c, std::span<const double> c2, bool enlarged,
                        int order) {
    const std::size_t N = batch.n_paths, n = batch.steps();
    QuadPass out;
    out.L.assign(N * (n + 1), 0.0);
    out.Z.assign(N * n, 0.0);
    std::vector<double> cur(c2.begin(), c2.end()), next(N), resid(N);
    for (std::size_t p = 0; p < N; ++p) out.L[p * (n + 1) + n] = cur[p];
    for (std::size_t i = n; i-- > 0;) {
        const StateColumns st = state_at(batch, i, enlarged);
        const Regressor reg(st.vars, order);
        out.max_condition = std::max(out.max_condition, reg.condition());
        const auto fit = reg.project(cur);
        for (std::size_t p = 0; p < N; ++p) resid[p] = (cur[p] - fit[p]) * batch.dWH[p * n + i];
        auto z = reg.project(resid);
        for (std::size_t p = 0; p < N; ++p) {
            z[p] /= c.dt[i];
            const double ft = c.iota[i] + batch.phi_drift[p * n + i];
            next[p] = cur[p] + quadratic_driver(z[p], ft, c.r[i], c.sigma[i], c.sigma_tilde[i]) * c.dt[i];
        }
        cur = reg.project(next);
        for (std::size_t p = 0; p < N; ++p) {
            out.L[p * (n + 1) + i] = cur[p];
            out.Z[p * n + i] = z[p];
        }
    }
    return out;
}

double decile_residual(std::span<const double> y, std::span<const double> res) {
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    double worst = 0.0;
    const std::size_t bins = std::min<std::size_t>(10, y.size());
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = b * y.size() / bins, hi = (b + 1) * y.size() / bins;
        CompensatedSum s;
        for (std::size_t k = lo; k < hi; ++k) s.add(res[order[k]]);
        worst = std::max(worst, std::abs(s.value() / static_cast<double>(hi - lo)));
    }
    return worst;
}

} // namespace

BsdeSolution solve_quadratic_lsmc(const PathBatch& batch, const MarketParams& market, const InsiderSpec& insider,
                                  double c2_init, const QuadraticOptions& options) {
    const bool enlarged = insider.enlarged();
    if (enlarged && !insider.unit_weight())
        fail(ErrorKind::Domain, "unsupported_phi", "quadratic solver supports unit weight only");
    if (options.max_iterations < 1 || !(options.tolerance > 0.0))
        fail(ErrorKind::Validation, "shooting_options", "need max_iterations >= 1 and tolerance > 0");
    const std::size_t N = batch.n_paths, n = batch.steps();
    const StepCoeffs c = step_coeffs(batch.grid, market);
    const double lnX0 = std::log(market.X0);

    BsdeSolution sol;
    sol.grid = batch.grid;
    sol.n_paths = N;
    std::vector<double> c2(N, c2_init), res(N);
    std::unique_ptr<Regressor> c2_reg;
    if (enlarged) c2_reg = std::make_unique<Regressor>(std::vector{std::span<const double>(batch.Y0)}, options.c2_order);

    double prev_c = 0.0, prev_L0 = 0.0;
    for (int it = 0; it < options.max_iterations; ++it) {
        QuadPass pass = quadratic_pass(batch, c, c2, enlarged, options.basis_order);
        sol.max_condition = std::max(sol.max_condition, pass.max_condition);
        CompensatedSum L0sum, csum;
        for (std::size_t p = 0; p < N; ++p) {
            res[p] = lnX0 - pass.L[p * (n + 1)];
            L0sum.add(pass.L[p * (n + 1)]);
            csum.add(c2[p]);
        }
        const double meanL0 = L0sum.value() / static_cast<double>(N);
        const double meanc = csum.value() / static_cast<double>(N);
        if (it > 0 && meanc != prev_c && !((meanL0 - prev_L0) / (meanc - prev_c) > 0.0)) sol.monotone = false;

        std::vector<double> correction;
        double residual;
        if (enlarged) {
            correction = c2_reg->project(res);
            CompensatedSum sq;
            for (double x : correction) sq.add(x * x);
            residual = std::sqrt(sq.value() / static_cast<double>(N));
        } else {
            residual = std::abs(lnX0 - meanL0);
        }
        sol.trace.push_back({it, meanc, residual});

        if (residual <= options.tolerance) {
            sol.Y = std::move(pass.L);
            sol.Z = std::move(pass.Z);
            sol.c = c2;
            sol.residual = residual;
            sol.bin_residual = enlarged ? decile_residual(batch.Y0, res) : residual;
            return sol;
        }

        if (enlarged) {
            for (std::size_t p = 0; p < N; ++p) c2[p] += correction[p];
        } else {
            // Secant on g(c) = L_0(c) - ln X0, unit slope for the first step.
            double slope = 1.0;
            if (it > 0 && meanc != prev_c && meanL0 != prev_L0) slope = (meanL0 - prev_L0) / (meanc - prev_c);
            const double next = meanc - (meanL0 - lnX0) / slope;
            std::fill(c2.begin(), c2.end(), next);
        }
        prev_c = meanc;
        prev_L0 = meanL0;
    }
    fail(ErrorKind::NonConvergence, "shooting_not_converged",
         "c2 shooting did not converge in " + std::to_string(options.max_iterations) +
             " iterations; last residual " + std::to_string(sol.trace.back().residual));
}

StrategyProfile recover_controls(const BsdeSolution& sol, const MarketParams& market, const PathBatch& batch,
                                 BsdeKind kind) {
    if (!(sol.grid == batch.grid))
        fail(ErrorKind::GridMismatch, "grid_mismatch", "solution and batch were built on different grids");
    const StepCoeffs c = step_coeffs(batch.grid, market);
    StrategyProfile prof;
    const bool signal = has_signal(batch);
    prof.kind = kind == BsdeKind::Quadratic ? StrategyKind::LargeInsiderRobust
                                            : (signal ? StrategyKind::SmallInsiderRobust : StrategyKind::NoInsiderRobust);
    prof.grid = batch.grid;
    prof.n_paths = batch.n_paths;
    const std::size_t n = batch.steps();
    prof.pi.assign(prof.n_paths * n, 0.0);
    prof.theta.assign(prof.n_paths * n, 0.0);
    for (std::size_t p = 0; p < prof.n_paths; ++p)
        for (std::size_t i = 0; i < n; ++i) {
            const double z = sol.Z_at(p, i);
            const double ft = c.iota[i] + batch.phi_drift[p * n + i];
            double& pi = prof.pi[p * n + i];
            double& th = prof.theta[p * n + i];
            if (kind == BsdeKind::Linear) {
                pi = z / (c.sigma[i] * sol.Y_at(p, i));
                th = c.sigma_tilde[i] * pi - ft;
            } else {
                const double s = c.sigma[i], st = c.sigma_tilde[i];
                pi = (z + ft) / (s + st);
                th = (st * z - s * ft) / (s + st);
            }
        }
    return prof;
}

double relative_rmse_interior(std::span<const double> a, std::span<const double> b, std::size_t n_paths,
                              std::size_t steps) {
    if (a.size() != n_paths * steps || b.size() != n_paths * steps)
        fail(ErrorKind::GridMismatch, "rmse_shape", "fields differ in shape");
    if (steps < 3) fail(ErrorKind::Domain, "rmse_no_interior", "need at least three steps");
    CompensatedSum err, ref;
    for (std::size_t p = 0; p < n_paths; ++p)
        for (std::size_t i = 1; i + 1 < steps; ++i) {
            const double d = a[p * steps + i] - b[p * steps + i];
            err.add(d * d);
            ref.add(b[p * steps + i] * b[p * steps + i]);
        }
    return ref.value() > 0.0 ? std::sqrt(err.value() / ref.value())
                             : std::sqrt(err.value() / static_cast<double>(n_paths * (steps - 2)));
}

SampleStats value_from_bsde(const BsdeSolution& sol) {
    std::vector<double> terminal(sol.n_paths);
    for (std::size_t p = 0; p < sol.n_paths; ++p) terminal[p] = sol.Y_at(p, sol.steps());
    return sample_stats(terminal);
}

} // namespace insider
