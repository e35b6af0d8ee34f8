#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace insider {

// Integrands with closed-form forward integrals:
//   WT               u_s = W_T      ->  int_0^t u d-W = W_T W_t
//   WTSquared        u_s = W_T^2    ->  W_T^2 W_t
//   AdaptedConstVol  u_s = c        ->  c W_t
enum class TestIntegrand { WT, WTSquared, AdaptedConstVol };

std::string to_string(TestIntegrand u);
TestIntegrand test_integrand_from_string(const std::string& s);

// Brownian path on a uniform grid of [0, T]; W[0] = 0.
struct FinePath {
    double T = 1.0;
    std::vector<double> W;

    std::size_t steps() const { return W.size() - 1; }
    double dt() const { return T / static_cast<double>(steps()); }
    double W_T() const { return W.back(); }
};

std::vector<FinePath> fine_paths(std::uint64_t seed, std::size_t n_paths, std::size_t n_steps, double T);

// eps / dt as an integer >= 2; anything else is rejected.
std::size_t eps_multiple(const FinePath& path, double eps);

// (1/eps) int_0^t u_s (W_{(s+eps) ^ T} - W_s) ds with left-point quadrature;
// u holds the integrand at every knot.
double forward_riemann(const FinePath& path, std::span<const double> u, double t, double eps);
double forward_riemann(const FinePath& path, TestIntegrand u, double t, double eps, double c = 1.0);

double forward_oracle(const FinePath& path, TestIntegrand u, double t, double c = 1.0);

// f(X_t) - f(X_0) - 2 int X u d-W - int u^2 ds for f(x) = x^2 and X_t = int_0^t u d-W.
double ito_residual(const FinePath& path, TestIntegrand u, double t, double eps, double c = 1.0);

struct ConvergenceRow {
    double eps = 0.0;
    double rms_error = 0.0;
    double rel_rms = 0.0;
    double ito_rms = 0.0;
};

std::vector<ConvergenceRow> convergence_table(const std::vector<FinePath>& paths, TestIntegrand u, double t,
                                              std::span<const double> eps_levels, double c = 1.0);

} // namespace insider
