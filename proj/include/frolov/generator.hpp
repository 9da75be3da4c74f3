#pragma once

// Frolov generator matrices. build_generator constructs the Vandermonde matrix
// of the d real roots of prod_j (x - (2j-1)) - 1 and certifies the lattice
// property prod_j |(Bm)_j| >= 1 by a finite scan over 0 < |m|_inf <= radius.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "frolov/linalg.hpp"

namespace frolov {

struct FrolovMatrix {
    int dim = 0;
    Matrix entries;
    double det_abs = 0.0;   // |det B|
    int check_radius = 0;   // sup-norm radius of the certification scan
    double check_margin = 0.0; // smallest prod_j |(Bm)_j| seen in the scan
};

struct ScaledGenerator {
    FrolovMatrix base;
    double n = 0.0;
    Matrix entries; // (n/det_abs)^(1/d) * B, so |det| = n
};

namespace detail {

// p(x) = prod_j (x - (2j-1)) - 1, evaluated in product form (stable for the
// root magnitudes involved; no coefficient expansion needed).
inline double generator_poly(std::span<const double> knots, double x) {
    double p = 1.0;
    for (double a : knots) p *= (x - a);
    return p - 1.0;
}

inline double generator_poly_deriv(std::span<const double> knots, double x) {
    // sum over i of prod_{j != i} (x - a_j)
    const std::size_t d = knots.size();
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double t = 1.0;
        for (std::size_t j = 0; j < d; ++j)
            if (j != i) t *= (x - knots[j]);
        s += t;
    }
    return s;
}

// All d real roots of the generator polynomial, ascending. The roots are
// separated by ~2 (they sit near distinct odd integers), so a fixed-step
// bracketing scan followed by bisection + one Newton polish is reliable.
inline std::vector<double> generator_roots(int d) {
    std::vector<double> knots(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) knots[static_cast<std::size_t>(j)] = 2.0 * j + 1.0;

    const double lo = knots.front() - 2.0;
    const double hi = knots.back() + 2.0;
    const int steps = 256 * d;
    const double h = (hi - lo) / steps;

    std::vector<double> roots;
    double xa = lo;
    double fa = generator_poly(knots, xa);
    for (int k = 1; k <= steps; ++k) {
        const double xb = lo + k * h;
        const double fb = generator_poly(knots, xb);
        if (fa == 0.0) roots.push_back(xa);
        if (fa * fb < 0.0) {
            double a = xa, b = xb, va = fa;
            for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
                const double m = 0.5 * (a + b);
                const double vm = generator_poly(knots, m);
                if (vm == 0.0) { a = b = m; break; }
                if (va * vm < 0.0) b = m;
                else { a = m; va = vm; }
            }
            double r = 0.5 * (a + b);
            const double dp = generator_poly_deriv(knots, r);
            if (dp != 0.0) r -= generator_poly(knots, r) / dp; // Newton polish
            roots.push_back(r);
        }
        xa = xb;
        fa = fb;
    }

    std::sort(roots.begin(), roots.end());
    if (static_cast<int>(roots.size()) != d)
        throw std::runtime_error("build_generator: root bracketing found " +
                                 std::to_string(roots.size()) + " real roots, expected " +
                                 std::to_string(d));
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
        if (roots[i + 1] - roots[i] < 1e-6)
            throw std::runtime_error("build_generator: roots not distinct");
    for (double r : roots)
        if (std::fabs(generator_poly(knots, r)) > 1e-9)
            throw std::runtime_error("build_generator: root residual too large");
    return roots;
}

// Recursive scan over m with the first nonzero coordinate positive (the
// product is even in m), accumulating y = B m one column at a time.
struct AdmissibilityScan {
    const Matrix& b;
    int radius;
    double best = std::numeric_limits<double>::infinity();

    void run(int level, bool leading_zero, std::vector<double>& y) {
        const int d = b.dim();
        const int lo = leading_zero ? 0 : -radius;
        if (level == d - 1) {
            for (int m = lo; m <= radius; ++m) {
                if (leading_zero && m == 0) continue; // excludes m = 0 overall
                double prod = 1.0;
                for (int j = 0; j < d; ++j)
                    prod *= std::fabs(y[static_cast<std::size_t>(j)] + m * b(j, level));
                if (prod < best) best = prod;
            }
            return;
        }
        std::vector<double> y2(static_cast<std::size_t>(d));
        for (int m = lo; m <= radius; ++m) {
            for (int j = 0; j < d; ++j)
                y2[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)] + m * b(j, level);
            run(level + 1, leading_zero && m == 0, y2);
        }
    }
};

} // namespace detail

// min over 0 < |m|_inf <= radius of prod_j |(Bm)_j|.
inline double admissibility_margin(const Matrix& b, int radius,
                                   double candidate_cap = 2e9) {
    if (radius < 1) throw std::invalid_argument("admissibility_margin: radius must be >= 1");
    if (std::fabs(determinant(b)) == 0.0)
        throw std::invalid_argument("admissibility_margin: singular matrix");
    const int d = b.dim();
    double count = 1.0;
    for (int i = 0; i < d; ++i) count *= 2.0 * radius + 1.0;
    if (count / 2.0 > candidate_cap)
        throw std::runtime_error("admissibility_margin: scan of " + std::to_string(count / 2.0) +
                                 " candidates exceeds cap; reduce the radius");
    detail::AdmissibilityScan scan{b, radius};
    std::vector<double> y(static_cast<std::size_t>(d), 0.0);
    scan.run(0, true, y);
    return scan.best;
}

inline FrolovMatrix build_generator(int d, int check_radius) {
    if (d < 1) throw std::invalid_argument("build_generator: d must be >= 1");
    if (check_radius < 1) throw std::invalid_argument("build_generator: check_radius must be >= 1");

    FrolovMatrix out;
    out.dim = d;
    out.check_radius = check_radius;

    if (d == 1) {
        out.entries = Matrix(1, {1.0});
        out.det_abs = 1.0;
        out.check_margin = 1.0; // attained at m = +-1
        return out;
    }

    const std::vector<double> roots = detail::generator_roots(d);
    Matrix b(d);
    for (int i = 0; i < d; ++i) {
        double pw = 1.0;
        for (int j = 0; j < d; ++j) {
            b(i, j) = pw;
            pw *= roots[static_cast<std::size_t>(i)];
        }
    }
    out.entries = b;

    // Vandermonde determinant, more accurate than LU for this structure.
    double det = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            det *= roots[static_cast<std::size_t>(j)] - roots[static_cast<std::size_t>(i)];
    out.det_abs = std::fabs(det);

    out.check_margin = admissibility_margin(b, check_radius);
    if (out.check_margin < 1.0 - 1e-9)
        throw std::runtime_error("build_generator: non-admissible matrix, margin " +
                                 std::to_string(out.check_margin) +
                                 " (numerical root error suspected)");
    return out;
}

inline ScaledGenerator scale(const FrolovMatrix& base, double n) {
    if (!(n > 0.0)) throw std::invalid_argument("scale: n must be > 0");
    ScaledGenerator g;
    g.base = base;
    g.n = n;
    const double c = std::pow(n / base.det_abs, 1.0 / base.dim);
    g.entries = base.entries.scaled(c);
    return g;
}

} // namespace frolov
