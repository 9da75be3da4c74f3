#pragma once

// Smoothness metadata (S, p, isotropic|mixed) and closed-form Fourier data
// attached to test integrands.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace frolov {

enum class SmoothnessMode { isotropic, mixed };

struct SmoothnessSpec {
    std::vector<double> S; // per-coordinate smoothness, entries >= 0
    double p = 2.0;        // integrability in [1, inf]
    SmoothnessMode mode = SmoothnessMode::mixed;

    // (sum_j 1/S_j)^{-1}, or 0 if some S_j = 0.
    double harmonic_aggregate() const {
        double inv = 0.0;
        for (double s : S) {
            if (s <= 0.0) return 0.0;
            inv += 1.0 / s;
        }
        return 1.0 / inv;
    }

    double s_min() const {
        double m = std::numeric_limits<double>::infinity();
        for (double s : S) m = std::min(m, s);
        return m;
    }

    // max{0, 1/p - 1/2}
    double integrability_penalty() const {
        const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
        return std::max(0.0, ip - 0.5);
    }

    void validate() const {
        if (S.empty()) throw std::invalid_argument("SmoothnessSpec: empty S");
        for (double s : S)
            if (s < 0.0) throw std::invalid_argument("SmoothnessSpec: negative smoothness");
        if (!(p >= 1.0)) throw std::invalid_argument("SmoothnessSpec: p must be >= 1");
    }
};

struct FourierProfile {
    // Full transform at a frequency vector.
    std::function<std::complex<double>(std::span<const double>)> eval;
    // Per-axis factors for tensor-product integrands (empty if not tensor).
    std::vector<std::function<std::complex<double>(double)>> axis;
    std::string decay_note;
};

} // namespace frolov
