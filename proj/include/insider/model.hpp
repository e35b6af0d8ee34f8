#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace insider {

// Right-continuous step function: value values[j] on [starts[j], starts[j+1]),
// the last value extends to +infinity. starts[0] must be 0.
class PiecewiseConstant {
public:
    PiecewiseConstant(double value = 0.0);  // NOLINT: implicit constant conversion is intended
    PiecewiseConstant(std::vector<double> starts, std::vector<double> values);

    double operator()(double t) const;

    // Exact integral over [a, b] (a <= b).
    double integral(double a, double b) const;
    double integral_sq(double a, double b) const;

    std::span<const double> starts() const { return starts_; }
    std::span<const double> values() const { return values_; }
    bool is_constant() const { return values_.size() == 1; }

    double min_on(double a, double b) const;
    double max_on(double a, double b) const;

private:
    std::size_t segment(double t) const;

    std::vector<double> starts_;
    std::vector<double> values_;
};

struct MarketParams {
    PiecewiseConstant r{0.0};
    PiecewiseConstant mu0{0.0};
    PiecewiseConstant sigma{1.0};
    PiecewiseConstant varrho{0.0};
    double T = 1.0;
    double X0 = 1.0;
    double eps = 1e-6;  // volatility floor

    // Sorted breakpoints of all coefficients inside (0, T), without 0 and T.
    std::vector<double> breakpoints() const;
    bool is_constant() const;
    bool small_trader() const;  // varrho == 0 on [0, T]
};

enum class InsiderKind { NoInsider, InitialEnlargement };

struct InsiderSpec {
    InsiderKind kind = InsiderKind::NoInsider;
    double T0 = 0.0;
    PiecewiseConstant phi_weight{1.0};

    bool enlarged() const { return kind == InsiderKind::InitialEnlargement; }
    bool unit_weight() const { return phi_weight.is_constant() && phi_weight(0.0) == 1.0; }
};

struct ScenarioConfig {
    MarketParams market;
    InsiderSpec insider;
    bool robust = true;
    int n_steps = 200;
    int n_steps_tail = 0;  // 0: same step size as on [0, T]
    std::int64_t n_paths = 10000;
    std::uint64_t seed = 20240101;
};

// Throw Error{Validation, code} on the first violated invariant.
void validate(const MarketParams& market);
void validate(const InsiderSpec& insider, double T);
void validate(const ScenarioConfig& config);

double iota(const MarketParams& market, double t);
double sigma_tilde(const MarketParams& market, double t);

// ||phi||^2 over [s, t].
double phi_norm_sq(const InsiderSpec& insider, double s, double t);

// Integral over [a, b] of a function that is constant between market
// breakpoints; f is sampled at the left end of every constancy segment.
template <class F>
double integrate_segments(const MarketParams& market, double a, double b, F&& f) {
    double total = 0.0;
    double lo = a;
    for (double bp : market.breakpoints()) {
        if (bp <= lo) continue;
        if (bp >= b) break;
        total += f(lo) * (bp - lo);
        lo = bp;
    }
    if (b > lo) total += f(lo) * (b - lo);
    return total;
}

std::string to_string(InsiderKind kind);
InsiderKind insider_kind_from_string(const std::string& s);

} // namespace insider
