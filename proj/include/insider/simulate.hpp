#pragma once

#include "insider/model.hpp"
#include "insider/paths.hpp"
#include "insider/stats.hpp"
#include "insider/strategies.hpp"

#include <span>
#include <vector>

namespace insider {

// Per-path, per-knot arrays on [0, T]; layout n_paths x (steps + 1).
struct WealthPath {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::vector<double> logX;

    std::size_t knots() const { return grid.steps_to_T() + 1; }
    double terminal(std::size_t p) const { return logX[p * knots() + knots() - 1]; }
};

struct DensityPath {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::vector<double> logE;

    std::size_t knots() const { return grid.steps_to_T() + 1; }
    double terminal(std::size_t p) const { return logE[p * knots() + knots() - 1]; }
};

using JEstimate = SampleStats;

WealthPath simulate_wealth(const PathBatch& batch, const StrategyProfile& profile, const MarketParams& market);
DensityPath simulate_density(const PathBatch& batch, const StrategyProfile& profile);

// Per-path J integrand: eps_T ln X_T + sum eps_{t_i} theta_i^2 / 2 dt_i.
std::vector<double> j_functional(const PathBatch& batch, const StrategyProfile& profile,
                                 const WealthPath& wealth, const DensityPath& density);
JEstimate estimate_J(const PathBatch& batch, const StrategyProfile& profile, const WealthPath& wealth,
                     const DensityPath& density);

struct EntropyCheck {
    SampleStats lhs;  // E[eps_T ln eps_T]
    SampleStats rhs;  // E[int eps theta^2 / 2 ds]
    double gap = 0.0;
    double combined_se = 0.0;
    double z() const { return combined_se > 0.0 ? gap / combined_se : 0.0; }
};

// Per-path sides of the entropy identity, written to lhs/rhs.
void entropy_functionals(const PathBatch& batch, const StrategyProfile& profile, const DensityPath& density,
                         std::vector<double>& lhs, std::vector<double>& rhs);
EntropyCheck entropy_identity_check(const PathBatch& batch, const StrategyProfile& profile,
                                    const DensityPath& density);
EntropyCheck entropy_from_samples(std::span<const double> lhs, std::span<const double> rhs);

struct MartingaleRow {
    double t = 0.0;
    double h = 0.0;
    SampleStats stats;
};

// Equally spaced checkpoints 0, T/k, ..., T.
std::vector<double> default_checkpoints(double T, int intervals = 10);

// Per-path eps_T (m_{c_{k+1}} - m_{c_k}); layout n_paths x (checkpoints - 1).
std::vector<double> martingale_increments(const PathBatch& batch, const StrategyProfile& profile,
                                          const MarketParams& market, const DensityPath& density,
                                          std::span<const double> checkpoints);
std::vector<MartingaleRow> martingale_diagnostic(const PathBatch& batch, const StrategyProfile& profile,
                                                 const MarketParams& market, const DensityPath& density,
                                                 std::span<const double> checkpoints);

// Chunked Monte-Carlo run of a closed-form regime. Results depend only on
// (config, options), never on chunk size or thread count.
struct McOptions {
    std::size_t chunk = 25000;
    double pi_scale = 1.0;     // perturbs pi, keeps theta
    double theta_scale = 1.0;  // perturbs theta, keeps pi
    std::vector<double> checkpoints;  // empty: no martingale diagnostic
};

struct McResult {
    StrategyKind kind = StrategyKind::NoInsiderRobust;
    std::size_t n_paths = 0;
    JEstimate J;
    SampleStats lnXT;
    SampleStats epsT;
    EntropyCheck entropy;
    std::vector<MartingaleRow> martingale;
};

McResult run_monte_carlo(const ScenarioConfig& config, StrategyKind kind, const McOptions& options = {});

} // namespace insider
