#pragma once

#include "insider/model.hpp"
#include "insider/paths.hpp"
#include "insider/stats.hpp"
#include "insider/strategies.hpp"

#include <span>
#include <vector>

namespace insider {

enum class LinearScheme {
    Auto,          // Direct without insider information, LogTransform under enlargement
    Direct,        // backward Euler on X itself
    LogTransform,  // backward Euler on U = ln X with zeta = Z / X
};

struct ShootingStep {
    int iteration = 0;
    double c = 0.0;         // scalar c2, or mean of c2(Y0) under enlargement
    double residual = 0.0;  // |L_0 - ln X0|, or RMS of its Y0-projection
};

struct BsdeSolution {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::vector<double> Y;   // n_paths x (steps + 1): X (linear) or L (quadratic)
    std::vector<double> Z;   // n_paths x steps
    std::vector<double> c;   // per path: normalizer (linear) or c2(Y0) (quadratic)
    double residual = 0.0;
    double bin_residual = 0.0;  // max over Y0 deciles of |mean(L_0) - ln X0|
    double max_condition = 0.0;
    bool monotone = true;
    std::vector<ShootingStep> trace;

    std::size_t steps() const { return grid.steps_to_T(); }
    double Y_at(std::size_t p, std::size_t i) const { return Y[p * (steps() + 1) + i]; }
    double Z_at(std::size_t p, std::size_t i) const { return Z[p * steps() + i]; }
};

// Per-path ln Pi*(t1, t2) = -int r - int phitilde dWH - 1/2 int phitilde^2, left-point sums.
std::vector<double> log_pi_star(const PathBatch& batch, const MarketParams& market, double t1, double t2);
std::vector<double> pi_star_functional(const PathBatch& batch, const MarketParams& market, double t1, double t2);

// Gaussian closed form; constant parameters under enlargement with unit weight.
BsdeSolution solve_linear_closed_form(const PathBatch& batch, const MarketParams& market,
                                      const InsiderSpec& insider);

// Closed-form ln E[sqrt(Pi*(0, T)) | Y0 = y] under enlargement with unit weight.
double log_normalizer(const MarketParams& market, const InsiderSpec& insider, double y);

BsdeSolution solve_linear_lsmc(const PathBatch& batch, const MarketParams& market, const InsiderSpec& insider,
                               int basis_order = 3, LinearScheme scheme = LinearScheme::Auto);

struct QuadraticOptions {
    int basis_order = 3;
    int c2_order = 2;
    double tolerance = 1e-3;
    int max_iterations = 50;
};

// Large-insider quadratic driver.
double quadratic_driver(double z, double phitilde, double r, double sigma, double sigma_tilde);
double quadratic_leading_coefficient(double sigma, double sigma_tilde);

BsdeSolution solve_quadratic_lsmc(const PathBatch& batch, const MarketParams& market, const InsiderSpec& insider,
                                  double c2_init, const QuadraticOptions& options = {});

enum class BsdeKind { Linear, Quadratic };

// Linear: pi = Z / (sigma Y), theta from the conversion identity.
// Quadratic: pi = (z + phitilde) / (sigma + sigma_tilde), theta = (sigma_tilde z - sigma phitilde) / (sigma + sigma_tilde).
StrategyProfile recover_controls(const BsdeSolution& sol, const MarketParams& market, const PathBatch& batch,
                                 BsdeKind kind);

// sqrt(mean (a - b)^2) / sqrt(mean b^2) over knots 1 .. steps - 2 of every
// path; layout n_paths x steps. Absolute RMSE when b vanishes.
double relative_rmse_interior(std::span<const double> a, std::span<const double> b, std::size_t n_paths,
                              std::size_t steps);

// Mean and SE of the terminal Y (= c2 for the quadratic solver).
SampleStats value_from_bsde(const BsdeSolution& sol);

} // namespace insider
