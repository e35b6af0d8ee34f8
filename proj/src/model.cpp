#include "insider/model.hpp"

#include "insider/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace insider {

PiecewiseConstant::PiecewiseConstant(double value) : starts_{0.0}, values_{value} {
    if (!std::isfinite(value))
        fail(ErrorKind::Validation, "coefficient_not_finite", "coefficient values must be finite");
}

PiecewiseConstant::PiecewiseConstant(std::vector<double> starts, std::vector<double> values)
    : starts_(std::move(starts)), values_(std::move(values)) {
    if (starts_.empty() || starts_.size() != values_.size())
        fail(ErrorKind::Validation, "breakpoints_malformed",
             "piecewise function needs one value per breakpoint");
    if (starts_.front() != 0.0)
        fail(ErrorKind::Validation, "breakpoints_malformed", "first breakpoint must be 0");
    for (std::size_t j = 1; j < starts_.size(); ++j)
        if (!(starts_[j] > starts_[j - 1]))
            fail(ErrorKind::Validation, "breakpoints_not_increasing",
                 "breakpoints must be strictly increasing");
    for (double v : values_)
        if (!std::isfinite(v))
            fail(ErrorKind::Validation, "coefficient_not_finite", "coefficient values must be finite");
}

std::size_t PiecewiseConstant::segment(double t) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    if (it == starts_.begin()) return 0;
    return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

double PiecewiseConstant::operator()(double t) const { return values_[segment(t)]; }

double PiecewiseConstant::integral(double a, double b) const {
    if (a > b) fail(ErrorKind::Domain, "interval_reversed", "integral bounds reversed");
    double total = 0.0;
    for (std::size_t j = segment(a); j < starts_.size(); ++j) {
        const double lo = std::max(a, starts_[j]);
        const double hi = j + 1 < starts_.size() ? std::min(b, starts_[j + 1]) : b;
        if (lo >= b) break;
        if (hi > lo) total += values_[j] * (hi - lo);
    }
    return total;
}

double PiecewiseConstant::integral_sq(double a, double b) const {
    if (a > b) fail(ErrorKind::Domain, "interval_reversed", "integral bounds reversed");
    double total = 0.0;
    for (std::size_t j = segment(a); j < starts_.size(); ++j) {
        const double lo = std::max(a, starts_[j]);
        const double hi = j + 1 < starts_.size() ? std::min(b, starts_[j + 1]) : b;
        if (lo >= b) break;
        if (hi > lo) total += values_[j] * values_[j] * (hi - lo);
    }
    return total;
}

double PiecewiseConstant::min_on(double a, double b) const {
    double m = values_[segment(a)];
    for (std::size_t j = segment(a) + 1; j < starts_.size() && starts_[j] < b; ++j)
        m = std::min(m, values_[j]);
    return m;
}

double PiecewiseConstant::max_on(double a, double b) const {
    double m = values_[segment(a)];
    for (std::size_t j = segment(a) + 1; j < starts_.size() && starts_[j] < b; ++j)
        m = std::max(m, values_[j]);
    return m;
}

std::vector<double> MarketParams::breakpoints() const {
    std::vector<double> out;
    for (const PiecewiseConstant* f : {&r, &mu0, &sigma, &varrho})
        for (double s : f->starts())
            if (s > 0.0 && s < T) out.push_back(s);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool MarketParams::is_constant() const { return breakpoints().empty(); }

bool MarketParams::small_trader() const {
    return varrho.min_on(0.0, T) == 0.0 && varrho.max_on(0.0, T) == 0.0;
}

void validate(const MarketParams& m) {
    if (!(m.T > 0.0) || !std::isfinite(m.T))
        fail(ErrorKind::Validation, "horizon_nonpositive", "T must be positive");
    if (!(m.X0 > 0.0) || !std::isfinite(m.X0))
        fail(ErrorKind::Validation, "x0_nonpositive", "X0 must be positive");
    if (!(m.eps > 0.0)) fail(ErrorKind::Validation, "eps_nonpositive", "eps must be positive");

    // Every coefficient is constant on the segments between merged breakpoints.
    std::vector<double> knots{0.0};
    for (double b : m.breakpoints()) knots.push_back(b);
    for (double t : knots) {
        const double sig = m.sigma(t);
        if (!(sig >= m.eps)) {
            std::ostringstream os;
            os << "sigma(" << t << ") = " << sig << " is below the floor " << m.eps;
            fail(ErrorKind::Validation, "sigma_below_floor", os.str());
        }
        const double rho = m.varrho(t);
        if (!(rho >= 0.0) || !(rho < 0.5 * sig * sig)) {
            std::ostringstream os;
            os << "varrho(" << t << ") = " << rho << " must lie in [0, sigma^2/2)";
            fail(ErrorKind::Validation, "varrho_out_of_range", os.str());
        }
    }
}

void validate(const InsiderSpec& ins, double T) {
    if (!ins.enlarged()) return;
    if (!(ins.T0 > T) || !std::isfinite(ins.T0))
        fail(ErrorKind::Validation, "t0_not_after_t", "T0 must exceed T for an initial enlargement");
    if (!(phi_norm_sq(ins, T, ins.T0) > 0.0))
        fail(ErrorKind::Validation, "phi_tail_norm_zero", "||phi||^2 on [T, T0] must be positive");
}

void validate(const ScenarioConfig& c) {
    validate(c.market);
    validate(c.insider, c.market.T);
    if (c.n_steps < 2) fail(ErrorKind::Validation, "n_steps_too_small", "n_steps must be >= 2");
    if (c.n_steps_tail < 0)
        fail(ErrorKind::Validation, "n_steps_tail_negative", "n_steps_tail must be >= 0");
    if (c.n_paths < 1) fail(ErrorKind::Validation, "n_paths_zero", "n_paths must be >= 1");
}

namespace {
void check_time(const MarketParams& m, double t) {
    if (!(t >= 0.0 && t <= m.T)) {
        std::ostringstream os;
        os << "time " << t << " outside [0, " << m.T << "]";
        fail(ErrorKind::Domain, "time_out_of_range", os.str());
    }
}
} // namespace

double iota(const MarketParams& m, double t) {
    check_time(m, t);
    return (m.mu0(t) - m.r(t)) / m.sigma(t);
}

double sigma_tilde(const MarketParams& m, double t) {
    check_time(m, t);
    const double s = m.sigma(t);
    return s - 2.0 * m.varrho(t) / s;
}

double phi_norm_sq(const InsiderSpec& ins, double s, double t) {
    if (s > t) fail(ErrorKind::Domain, "interval_reversed", "phi_norm_sq needs s <= t");
    if (s < 0.0) fail(ErrorKind::Domain, "time_out_of_range", "phi_norm_sq needs s >= 0");
    return ins.phi_weight.integral_sq(s, t);
}

std::string to_string(InsiderKind kind) {
    return kind == InsiderKind::NoInsider ? "none" : "enlargement";
}

InsiderKind insider_kind_from_string(const std::string& s) {
    if (s == "none" || s == "NoInsider") return InsiderKind::NoInsider;
    if (s == "enlargement" || s == "InitialEnlargement") return InsiderKind::InitialEnlargement;
    fail(ErrorKind::Validation, "unknown_insider_kind", "unknown insider kind '" + s + "'");
}

} // namespace insider
