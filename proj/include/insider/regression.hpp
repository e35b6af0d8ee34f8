#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace insider {

// Least-squares projection onto polynomials of total degree <= order in the
// given state variables. Variables are standardized first; variables with
// (numerically) zero spread are dropped, which covers the degenerate t = 0
// state. The Gram matrix is factorized once and reused for every target.
class Regressor {
public:
    Regressor(const std::vector<std::span<const double>>& vars, int order, double max_condition = 1e12);

    std::vector<double> project(std::span<const double> y) const;
    Eigen::VectorXd coefficients(std::span<const double> y) const;

    std::size_t rows() const { return static_cast<std::size_t>(design_.rows()); }
    std::size_t basis_size() const { return static_cast<std::size_t>(design_.cols()); }
    std::size_t active_variables() const { return active_.size(); }
    double condition() const { return condition_; }

private:
    Eigen::MatrixXd design_;
    Eigen::LDLT<Eigen::MatrixXd> gram_;
    std::vector<std::size_t> active_;
    double condition_ = 1.0;
};

// Exponent tuples of all monomials of total degree <= order in d variables,
// in graded order starting with the constant.
std::vector<std::vector<int>> monomial_exponents(std::size_t d, int order);

} // namespace insider
