#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace insider {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;

    double z() const { return std_error > 0.0 ? mean / std_error : 0.0; }
};

// Mean and standard error of the mean; two-pass with compensated sums.
inline SampleStats sample_stats(std::span<const double> xs) {
    SampleStats s;
    s.n = xs.size();
    if (xs.empty()) return s;
    CompensatedSum sum;
    for (double x : xs) sum.add(x);
    s.mean = sum.value() / static_cast<double>(s.n);
    if (s.n > 1) {
        CompensatedSum sq;
        for (double x : xs) sq.add((x - s.mean) * (x - s.mean));
        s.std_error = std::sqrt(sq.value() / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
    }
    return s;
}

} // namespace insider
