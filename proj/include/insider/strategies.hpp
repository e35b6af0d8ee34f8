#pragma once

#include "insider/model.hpp"
#include "insider/paths.hpp"

#include <string>
#include <vector>

namespace insider {

enum class StrategyKind {
    NoInsiderRobust,
    NoInsiderNonRobust,
    SmallInsiderRobust,
    SmallInsiderNonRobust,
    LargeInsiderNonRobust,
    LargeInsiderRobust,  // no closed form; see bsde
};

std::string to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& s);
bool is_robust(StrategyKind kind);
bool needs_enlargement(StrategyKind kind);

// Information available to the trader at one knot of one path.
struct PathState {
    double W_t = 0.0;
    double B_t = 0.0;   // int_0^t phi dW
    double Y0 = 0.0;    // int_0^T0 phi dW
    double W_T0 = 0.0;
    double phi = 0.0;   // information drift at t
};

double pi_no_insider_robust(const MarketParams& market, double t);
double theta_no_insider_robust(const MarketParams& market, double t);
double pi_no_insider_nonrobust(const MarketParams& market, double t);

double pi_small_insider_robust(const MarketParams& market, const InsiderSpec& insider,
                               const PathState& s, double t);
double theta_small_insider_robust(const MarketParams& market, const InsiderSpec& insider,
                                  const PathState& s, double t);
double pi_small_insider_nonrobust(const MarketParams& market, const PathState& s, double t);

// Full-information case: E[W_T0 | H_t] = W_T0, unit weight only.
double pi_large_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider,
                                  const PathState& s, double t);

// theta = sigma_tilde * pi - (iota + phi).
double theta_from_pi(const MarketParams& market, double phi, double pi, double t);

// Analytic d pi / d W_t of the affine regimes.
double slope_small_insider_robust(const MarketParams& market, const InsiderSpec& insider, double t);
double slope_large_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider, double t);
double slope_small_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider, double t);

// Integral of phi * iota over [a, b], exact for piecewise-constant inputs.
double integral_phi_iota(const MarketParams& market, const InsiderSpec& insider, double a, double b);

struct StrategyProfile {
    StrategyKind kind = StrategyKind::NoInsiderRobust;
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::vector<double> pi;     // n_paths x steps_to_T, left knots
    std::vector<double> theta;  // same layout; zero for non-robust kinds

    std::size_t steps() const { return grid.steps_to_T(); }
};

PathState path_state(const PathBatch& batch, std::size_t p, std::size_t i);

// Closed-form profile on every path and left knot of [0, T).
StrategyProfile build_profile(StrategyKind kind, const PathBatch& batch, const MarketParams& market,
                              const InsiderSpec& insider);

} // namespace insider
