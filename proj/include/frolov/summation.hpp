#pragma once

// Neumaier-compensated accumulation. Replication aggregates must not depend on
// summation order beyond the stored index order, and the cubature sums run to
// thousands of terms where naive roundoff would rival the statistical error.

#include <cmath>
#include <span>

namespace frolov {

struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

inline double compensated_sum(std::span<const double> xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

inline double compensated_mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

} // namespace frolov
