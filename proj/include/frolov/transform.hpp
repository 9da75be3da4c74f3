#pragma once

// C-infinity change of variable for integrands on the cube without boundary
// conditions: each coordinate is pushed through the normalized bump CDF and
// the Jacobian (a product of bump densities) makes the result compactly
// supported with the same integral.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "frolov/cubature.hpp"
#include "frolov/quadrature.hpp"

namespace frolov {

// e^{-1/(t(1-t))} on (0,1), identically 0 outside. The exponential underflows
// to an exact 0 near the endpoints, which matches the true value below any
// representable double.
inline double bump_weight(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(-1.0 / (t * (1.0 - t)));
}

// Cumulative table of the normalized bump weight. Direct quadrature per call
// is too slow inside cubature loops, so the CDF is tabulated once on a uniform
// grid with exact node derivatives and evaluated by monotone cubic Hermite
// interpolation, refined until the midpoint interpolation error is <= 1e-10.
class BumpCdfTable {
public:
    static const BumpCdfTable& instance() {
        static const BumpCdfTable table;
        return table;
    }

    double normalization() const { return c_; }

    double cdf(double t) const {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        const double u = t * panels_;
        std::size_t i = static_cast<std::size_t>(u);
        if (i >= static_cast<std::size_t>(panels_)) i = static_cast<std::size_t>(panels_) - 1;
        const double s = u - static_cast<double>(i);
        const double h = 1.0 / panels_;
        const double y0 = values_[i], y1 = values_[i + 1];
        const double d0 = deriv_[i] * h, d1 = deriv_[i + 1] * h;
        const double s2 = s * s, s3 = s2 * s;
        double y = (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * d0 +
                   (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * d1;
        if (y < 0.0) y = 0.0;
        if (y > 1.0) y = 1.0;
        return y;
    }

    double density(double t) const { return bump_weight(t) / c_; }

private:
    BumpCdfTable() {
        int n = 512;
        for (;;) {
            build(n);
            if (max_midpoint_error() <= 1e-10) break;
            if (n >= (1 << 20)) throw std::runtime_error("BumpCdfTable: refinement failed");
            n *= 2;
        }
        // Guard on the normalization itself: halving the panel width must not
        // move the total by more than 1e-12 relative.
        const double c2 = total_mass(2 * panels_);
        if (std::fabs(c2 - c_) > 1e-12 * c_)
            throw std::runtime_error("BumpCdfTable: normalization did not converge");
    }

    static double total_mass(int panels) {
        double sum = 0.0;
        for (int i = 0; i < panels; ++i)
            sum += gauss15_panel(bump_weight, static_cast<double>(i) / panels,
                                 static_cast<double>(i + 1) / panels);
        return sum;
    }

    void build(int panels) {
        panels_ = panels;
        raw_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
        for (int i = 0; i < panels; ++i)
            raw_[static_cast<std::size_t>(i) + 1] =
                raw_[static_cast<std::size_t>(i)] +
                gauss15_panel(bump_weight, static_cast<double>(i) / panels,
                              static_cast<double>(i + 1) / panels);
        c_ = raw_.back();

        values_.resize(raw_.size());
        deriv_.resize(raw_.size());
        for (std::size_t i = 0; i < raw_.size(); ++i) {
            values_[i] = raw_[i] / c_;
            deriv_[i] = bump_weight(static_cast<double>(i) / panels) / c_;
        }
        values_.back() = 1.0;

        // Fritsch-Carlson limiter: keeps the Hermite interpolant monotone even
        // in the underflow zone where consecutive values are equal.
        const double h = 1.0 / panels_;
        for (int i = 0; i < panels_; ++i) {
            const double delta = (values_[static_cast<std::size_t>(i) + 1] -
                                  values_[static_cast<std::size_t>(i)]) / h;
            if (delta == 0.0) {
                deriv_[static_cast<std::size_t>(i)] = 0.0;
                deriv_[static_cast<std::size_t>(i) + 1] = 0.0;
                continue;
            }
            const double alpha = deriv_[static_cast<std::size_t>(i)] / delta;
            const double beta = deriv_[static_cast<std::size_t>(i) + 1] / delta;
            const double r2 = alpha * alpha + beta * beta;
            if (r2 > 9.0) {
                const double tau = 3.0 / std::sqrt(r2);
                deriv_[static_cast<std::size_t>(i)] = tau * alpha * delta;
                deriv_[static_cast<std::size_t>(i) + 1] = tau * beta * delta;
            }
        }
    }

    double max_midpoint_error() const {
        double worst = 0.0;
        for (int i = 0; i < panels_; ++i) {
            const double mid = (static_cast<double>(i) + 0.5) / panels_;
            const double direct =
                (raw_[static_cast<std::size_t>(i)] +
                 gauss15_panel(bump_weight, static_cast<double>(i) / panels_, mid)) / c_;
            worst = std::max(worst, std::fabs(cdf(mid) - direct));
        }
        return worst;
    }

    int panels_ = 0;
    std::vector<double> raw_;    // unnormalized cumulative mass
    std::vector<double> values_; // cdf at grid nodes
    std::vector<double> deriv_;  // cdf derivative at grid nodes (possibly limited)
    double c_ = 0.0;
};

inline double bump_cdf(double t) { return BumpCdfTable::instance().cdf(t); }

inline double bump_cdf_density(double t) { return BumpCdfTable::instance().density(t); }

// Tf(x) = prod_j psi'(x_j) * f(psi(x_1), ..., psi(x_d)): compactly supported
// in the cube, same integral.
inline Integrand to_compact_support(const Integrand& f) {
    const int d = f.dim;
    Integrand g;
    g.dim = d;
    g.support_in_domain = true;
    g.exact_integral = f.exact_integral;
    g.smoothness = f.smoothness;
    g.name = f.name.empty() ? "boundary-free" : f.name + " (boundary-free)";
    auto inner = f.eval;
    g.eval = [inner, d](std::span<const double> x) {
        const BumpCdfTable& table = BumpCdfTable::instance();
        double jac = 1.0;
        for (int j = 0; j < d; ++j) {
            jac *= table.density(x[static_cast<std::size_t>(j)]);
            if (jac == 0.0) return 0.0;
        }
        thread_local Vec mapped;
        mapped.resize(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            mapped[static_cast<std::size_t>(j)] = table.cdf(x[static_cast<std::size_t>(j)]);
        return jac * inner(mapped);
    };
    return g;
}

inline EstimateResult randomized_frolov_boundary_free(const Integrand& f,
                                                      const ScaledGenerator& gen,
                                                      const Randomization& rand,
                                                      double cap = kDefaultEnumerationCap) {
    return randomized_frolov(to_compact_support(f), gen, rand, Domain::unit_cube(f.dim), cap);
}

} // namespace frolov
