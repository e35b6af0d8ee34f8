#pragma once

#include "insider/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace insider {

class TimeGrid {
public:
    // Uniform n_steps on [0, T] refined by every coefficient breakpoint; for an
    // enlarged insider the tail (T, T0] is appended.
    static TimeGrid build(const MarketParams& market, const InsiderSpec& insider, int n_steps,
                          int n_steps_tail = 0);
    static TimeGrid from_knots(std::vector<double> knots, std::size_t index_T);

    std::span<const double> knots() const { return knots_; }
    double t(std::size_t i) const { return knots_[i]; }
    double dt(std::size_t i) const { return knots_[i + 1] - knots_[i]; }
    std::size_t index_T() const { return index_T_; }
    std::size_t steps_to_T() const { return index_T_; }
    std::size_t n_steps() const { return knots_.size() - 1; }
    double T() const { return knots_[index_T_]; }
    double T_end() const { return knots_.back(); }

    // Index of the knot equal to t (within 1e-12), or throws Domain.
    std::size_t knot_index(double t) const;

    bool operator==(const TimeGrid& other) const = default;

private:
    std::vector<double> knots_;
    std::size_t index_T_ = 0;
};

// Ensemble of Brownian paths for paths [first_path, first_path + n_paths).
// Per-path arrays are row-major: path p, step i at [p * stride + i].
struct PathBatch {
    TimeGrid grid;
    std::uint64_t first_path = 0;
    std::size_t n_paths = 0;

    std::vector<double> dW;         // n_paths x grid.n_steps()       (all steps to T0)
    std::vector<double> W;          // n_paths x (steps_to_T + 1)     W at knots up to T
    std::vector<double> B;          // n_paths x (steps_to_T + 1)     int_0^t phi dW
    std::vector<double> Y0;         // n_paths                        int_0^T0 phi dW
    std::vector<double> W_T0;       // n_paths                        W at the last knot
    std::vector<double> phi_drift;  // n_paths x steps_to_T           information drift
    std::vector<double> dWH;        // n_paths x steps_to_T           dW - phi dt

    std::size_t steps() const { return grid.steps_to_T(); }
    std::span<const double> dW_path(std::size_t p) const {
        return {dW.data() + p * grid.n_steps(), grid.n_steps()};
    }
    std::span<const double> W_path(std::size_t p) const {
        return {W.data() + p * (steps() + 1), steps() + 1};
    }
    std::span<const double> B_path(std::size_t p) const {
        return {B.data() + p * (steps() + 1), steps() + 1};
    }
    std::span<const double> phi_path(std::size_t p) const {
        return {phi_drift.data() + p * steps(), steps()};
    }
    std::span<const double> dWH_path(std::size_t p) const {
        return {dWH.data() + p * steps(), steps()};
    }
};

// Deterministic in (seed, path index, step index) only.
PathBatch sample_paths(const ScenarioConfig& config, std::uint64_t first_path, std::size_t count);
PathBatch sample_paths(const ScenarioConfig& config);

// Information drift at one time; t >= T0 is a domain error.
double information_drift_at(const InsiderSpec& insider, double Y0, double B_t, double t);

// Per-path, per-step drift phi at left knots on [0, T]; zeros for NoInsider.
std::vector<double> information_drift(const PathBatch& batch, const InsiderSpec& insider);

// dW - phi dt on [0, T], using batch.phi_drift.
std::vector<double> decompose(const PathBatch& batch);

// Rebuild the batch on a grid whose steps aggregate `factor` consecutive steps.
PathBatch coarsen(const PathBatch& batch, const InsiderSpec& insider, int factor);

// Debug dump: path, t, dW, phi, dWH for steps on [0, T].
void write_path_dump(std::ostream& os, const PathBatch& batch);

} // namespace insider
