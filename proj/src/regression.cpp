#include "insider/regression.hpp"

#include "insider/error.hpp"
#include "insider/stats.hpp"

#include <cmath>
#include <sstream>

namespace insider {

std::vector<std::vector<int>> monomial_exponents(std::size_t d, int order) {
    std::vector<std::vector<int>> out;
    if (d == 0) {
        out.emplace_back();
        return out;
    }
    std::vector<int> cur(d, 0);
    auto rec = [&](auto&& self, std::size_t k, int left) -> void {
        if (k + 1 == d) {
            cur[k] = left;
            out.push_back(cur);
            return;
        }
        for (int a = left; a >= 0; --a) {
            cur[k] = a;
            self(self, k + 1, left - a);
        }
    };
    for (int deg = 0; deg <= order; ++deg) rec(rec, 0, deg);
    return out;
}

Regressor::Regressor(const std::vector<std::span<const double>>& vars, int order, double max_condition) {
    if (order < 0) fail(ErrorKind::Validation, "basis_order_negative", "basis order must be >= 0");
    const std::size_t n = vars.empty() ? 0 : vars.front().size();
    for (const auto& v : vars)
        if (v.size() != n) fail(ErrorKind::GridMismatch, "regression_rows", "state variables differ in length");
    if (n == 0) fail(ErrorKind::RankDeficient, "regression_empty", "regression needs at least one row");

    std::vector<std::vector<double>> z;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const SampleStats s = sample_stats(vars[j]);
        const double sd = s.std_error * std::sqrt(static_cast<double>(n));
        if (!(sd > 1e-12 * (1.0 + std::abs(s.mean)))) continue;
        active_.push_back(j);
        std::vector<double> col(n);
        for (std::size_t p = 0; p < n; ++p) col[p] = (vars[j][p] - s.mean) / sd;
        z.push_back(std::move(col));
    }

    const auto exps = monomial_exponents(active_.size(), order);
    design_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(exps.size()));
    for (std::size_t k = 0; k < exps.size(); ++k)
        for (std::size_t p = 0; p < n; ++p) {
            double v = 1.0;
            for (std::size_t j = 0; j < exps[k].size(); ++j)
                for (int a = 0; a < exps[k][j]; ++a) v *= z[j][p];
            design_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = v;
        }

    const Eigen::MatrixXd gram = design_.transpose() * design_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    condition_ = lo > 0.0 ? hi / lo : INFINITY;
    if (!(condition_ <= max_condition)) {
        std::ostringstream msg;
        msg << "regression design is rank deficient: condition number " << condition_ << " (limit "
            << max_condition << "), " << design_.cols() << " basis functions, " << n << " rows";
        fail(ErrorKind::RankDeficient, "rank_deficient", msg.str());
    }
    gram_.compute(gram);
}

Eigen::VectorXd Regressor::coefficients(std::span<const double> y) const {
    if (y.size() != rows()) fail(ErrorKind::GridMismatch, "regression_rows", "target length differs from design");
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    return gram_.solve(design_.transpose() * yv);
}

std::vector<double> Regressor::project(std::span<const double> y) const {
    const Eigen::VectorXd fit = design_ * coefficients(y);
    return {fit.data(), fit.data() + fit.size()};
}

} // namespace insider
