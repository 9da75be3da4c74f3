#pragma once

// 1-D quadrature used by the change-of-variable table and the Fourier-tail
// norms: fixed 15-point Gauss-Legendre panels, adaptive Simpson for
// piecewise-smooth integrands, and panel-doubling composites for oscillatory
// spectra where per-interval error estimates are unreliable.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace frolov {

namespace detail {

// Nodes/weights on [-1, 1].
inline constexpr std::array<double, 15> kGauss15Nodes = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601700, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};

inline constexpr std::array<double, 15> kGauss15Weights = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

} // namespace detail

template <typename F>
double gauss15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i)
        s += detail::kGauss15Weights[static_cast<std::size_t>(i)] *
             f(c + h * detail::kGauss15Nodes[static_cast<std::size_t>(i)]);
    return s * h;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double refined = left + right;
    const double err = (refined - whole) / 15.0;
    if (depth <= 0 || std::fabs(err) <= tol) return refined + err;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// For smooth or piecewise-smooth integrands (jumps are isolated in O(depth)
// work). Not suitable for integrands oscillating much faster than the
// interval; use the panel-doubling composites for those.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Composite Gauss-15 with panel doubling until two refinements agree to
// abs_tol. Panel counts double globally, so undersampled oscillation shows up
// as disagreement at the block scale instead of fooling a local estimate.
template <typename F>
double integrate_refining(F&& f, double a, double b, double abs_tol,
                          int initial_panels = 4, int max_panels = (1 << 21)) {
    if (a == b) return 0.0;
    const auto composite = [&](int panels) {
        const double h = (b - a) / panels;
        double s = 0.0;
        for (int i = 0; i < panels; ++i) s += gauss15_panel(f, a + i * h, a + (i + 1) * h);
        return s;
    };
    double prev = composite(initial_panels);
    for (int panels = 2 * initial_panels; panels <= max_panels; panels *= 2) {
        const double cur = composite(panels);
        if (std::fabs(cur - prev) <= abs_tol) return cur;
        prev = cur;
    }
    throw std::runtime_error("integrate_refining: did not converge to tolerance");
}

// Integral of f over [t0, inf) by doubling blocks [t0, 2 t0], [2 t0, 4 t0], ...
// until a block adds less than rel_tol of the accumulated value (or less than
// abs_floor, for callers that know the scale below which blocks cannot
// matter). Requires t0 > 0 and integrable polynomial decay.
template <typename F>
double integrate_tail(F&& f, double t0, double rel_tol = 1e-10, double abs_floor = 0.0,
                      int max_blocks = 200) {
    if (!(t0 > 0.0)) throw std::invalid_argument("integrate_tail: t0 must be positive");
    double total = 0.0;
    double scale = 0.0;
    double a = t0;
    for (int k = 0; k < max_blocks; ++k) {
        const double b = 2.0 * a;
        scale = std::max({scale, std::fabs(total), std::fabs(gauss15_panel(f, a, b))});
        const double tol = std::max({rel_tol * scale, abs_floor, 1e-300});
        const double inc = integrate_refining(f, a, b, tol);
        total += inc;
        a = b;
        if (k >= 4 && std::fabs(inc) <= std::max(rel_tol * std::fabs(total), abs_floor)) return total;
        if (k >= 4 && total == 0.0 && inc == 0.0) return total;
    }
    throw std::runtime_error("integrate_tail: truncation failure (tail does not decay)");
}

} // namespace frolov
