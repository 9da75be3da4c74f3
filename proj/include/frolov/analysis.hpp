#pragma once

// Oracles and predictors that make the convergence claims testable: the
// shift-MSE Fourier identity, the dilation tail bound, predicted rate
// exponents, and log-log rate fitting.

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "frolov/cubature.hpp"
#include "frolov/quadrature.hpp"
#include "frolov/summation.hpp"

namespace frolov {

struct RatePrediction {
    double exponent = 0.0;
    bool regime_ok = false;
    SmoothnessMode mode = SmoothnessMode::mixed;
};

// Predicted RMSE exponent: -g(S) - min{1/2, 1-1/p} (isotropic) or
// -s_min - min{1/2, 1-1/p} (mixed); valid when the aggregate smoothness
// clears max{0, 1/p - 1/2}.
inline RatePrediction predict_rate(const SmoothnessSpec& spec) {
    spec.validate();
    const double ip = std::isinf(spec.p) ? 0.0 : 1.0 / spec.p;
    const double gain = std::min(0.5, 1.0 - ip);
    const double agg = spec.mode == SmoothnessMode::isotropic ? spec.harmonic_aggregate()
                                                              : spec.s_min();
    RatePrediction out;
    out.mode = spec.mode;
    out.exponent = -(agg + gain);
    out.regime_ok = agg >= spec.integrability_penalty();
    return out;
}

struct ShiftMsePair {
    double grid_mse = 0.0;    // E_v |I(f) - Q_{B,v}(f)|^2 over a midpoint v-grid
    double fourier_sum = 0.0; // sum_{k != 0} |F f(B k)|^2
};

// Relative agreement with an absolute floor: configurations where every dual
// frequency hits a transform zero make both sides vanish identically, and a
// pure ratio would be 0/0 there.
inline bool shift_mse_agrees(const ShiftMsePair& pair, double rel_tol,
                             double abs_floor = 1e-15) {
    const double diff = std::fabs(pair.grid_mse - pair.fourier_sum);
    const double scale = std::max(std::fabs(pair.grid_mse), std::fabs(pair.fourier_sum));
    return diff <= rel_tol * scale + abs_floor;
}

inline ShiftMsePair shift_mse_identity(const Integrand& f, const Matrix& b, int v_grid_size,
                                       double tail_increment_tol = 1e-12, int max_k = 4096) {
    const int d = f.dim;
    if (d > 2) throw std::invalid_argument("shift_mse_identity: d <= 2 only");
    if (b.dim() != d) throw std::invalid_argument("shift_mse_identity: dimension mismatch");
    if (!f.fourier || !f.fourier->eval)
        throw std::invalid_argument("shift_mse_identity: integrand needs a Fourier profile");
    if (!f.exact_integral)
        throw std::invalid_argument("shift_mse_identity: integrand needs a known integral");
    if (v_grid_size < 1) throw std::invalid_argument("shift_mse_identity: grid size must be >= 1");

    ShiftMsePair out;
    const double exact = *f.exact_integral;
    const Domain dom = Domain::unit_cube(d);

    NeumaierSum mse;
    Vec v(static_cast<std::size_t>(d));
    if (d == 1) {
        for (int i = 0; i < v_grid_size; ++i) {
            v[0] = (i + 0.5) / v_grid_size;
            const double q = frolov_rule(f, b, v, dom);
            mse.add((exact - q) * (exact - q));
        }
        out.grid_mse = mse.value() / v_grid_size;
    } else {
        for (int i = 0; i < v_grid_size; ++i) {
            v[0] = (i + 0.5) / v_grid_size;
            for (int j = 0; j < v_grid_size; ++j) {
                v[1] = (j + 0.5) / v_grid_size;
                const double q = frolov_rule(f, b, v, dom);
                mse.add((exact - q) * (exact - q));
            }
        }
        out.grid_mse = mse.value() / (static_cast<double>(v_grid_size) * v_grid_size);
    }

    // Shell sums over |k|_inf = s, doubling the radius until the increment of
    // a full doubling drops below the tail tolerance.
    NeumaierSum series;
    Vec freq(static_cast<std::size_t>(d));
    Vec kvec(static_cast<std::size_t>(d));
    const auto add_term = [&](long long k1, long long k2) {
        kvec[0] = static_cast<double>(k1);
        if (d == 2) kvec[1] = static_cast<double>(k2);
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += b(i, j) * kvec[static_cast<std::size_t>(j)];
            freq[static_cast<std::size_t>(i)] = s;
        }
        series.add(std::norm(f.fourier->eval(freq)));
    };
    const auto add_shell = [&](long long s) {
        if (d == 1) {
            add_term(s, 0);
            add_term(-s, 0);
            return;
        }
        for (long long k = -s; k <= s; ++k) {
            add_term(-s, k);
            add_term(s, k);
        }
        for (long long k = -s + 1; k <= s - 1; ++k) {
            add_term(k, -s);
            add_term(k, s);
        }
    };

    long long radius = 4;
    for (long long s = 1; s <= radius; ++s) add_shell(s);
    double prev = series.value();
    for (;;) {
        const long long next = radius * 2;
        if (next > max_k)
            throw std::runtime_error("shift_mse_identity: truncation failure (profile decays too slowly)");
        for (long long s = radius + 1; s <= next; ++s) add_shell(s);
        radius = next;
        const double cur = series.value();
        if (std::fabs(cur - prev) < tail_increment_tol) {
            out.fourier_sum = cur;
            return out;
        }
        prev = cur;
    }
}

// Cumulative table of a squared spectral modulus |A(xi)|^2 with even modulus
// (A is the transform of a real function). Built on a uniform grid out to
// where geometric extrapolation puts the remaining mass below rel_floor of
// the total; a panel width of 1 resolves the unit-scale oscillation of the
// corpus spectra to Gauss-15 accuracy.
class SpectrumTail {
public:
    explicit SpectrumTail(std::function<double(double)> sq, double rel_floor = 1e-15,
                          double panel_width = 1.0, double t_cap = 16777216.0)
        : sq_(std::move(sq)), h_(panel_width) {
        cum_.push_back(0.0);
        NeumaierSum acc;
        double segment_start = 0.0;
        double segment_end = 4.0 * h_;
        double prev_inc = -1.0;
        for (;;) {
            double inc = 0.0;
            for (double a = segment_start; a < segment_end - 0.5 * h_; a += h_) {
                const double panel = gauss15_panel(sq_, a, a + h_);
                acc.add(panel);
                inc += panel;
                cum_.push_back(acc.value());
            }
            const double total = acc.value();
            if (prev_inc > 0.0 && inc < prev_inc) {
                const double ratio = inc / prev_inc;
                const double remaining = inc * ratio / (1.0 - ratio);
                if (remaining <= rel_floor * std::max(total, 1e-300)) break;
            }
            if (prev_inc == 0.0 && inc == 0.0 && segment_end >= 64.0 * h_) break;
            if (segment_end >= t_cap)
                throw std::runtime_error(
                    "SpectrumTail: truncation failure (spectrum decays too slowly)");
            prev_inc = inc;
            segment_start = segment_end;
            segment_end *= 2.0;
        }
        one_sided_ = acc.value();
    }

    double full() const { return 2.0 * one_sided_; }
    double t_max() const { return h_ * static_cast<double>(cum_.size() - 1); }

    // integral of the squared modulus over {|xi| >= cut}
    double tail(double cut) const {
        if (cut <= 0.0) return full();
        if (cut >= t_max()) return 0.0;
        const std::size_t i = static_cast<std::size_t>(cut / h_);
        const double upper = h_ * static_cast<double>(i + 1);
        double one = one_sided_ - cum_[std::min(i + 1, cum_.size() - 1)];
        one += gauss15_panel(sq_, cut, upper);
        return std::max(0.0, 2.0 * one);
    }

private:
    std::function<double(double)> sq_;
    std::vector<double> cum_; // cum_[i] = int_0^{i h} |A|^2
    double h_ = 1.0;
    double one_sided_ = 0.0;
};

// c_d n^{-1/2} || F f ||_{L2(D_n)} with c_d = 3^{d/2} sqrt(d_B) and
// D_n = { xi : prod_j |2 xi_j| >= n / d_B }. Needs per-axis Fourier factors.
inline double fourier_tail_bound(const Integrand& f, const ScaledGenerator& gen,
                                 double rel_tol = 1e-10) {
    const int d = f.dim;
    if (d > 2) throw std::invalid_argument("fourier_tail_bound: d <= 2 only");
    if (!f.fourier || static_cast<int>(f.fourier->axis.size()) != d)
        throw std::invalid_argument("fourier_tail_bound: integrand needs per-axis Fourier factors");
    const double n = gen.n;
    const double det_base = gen.base.det_abs;
    const double threshold = n / det_base;
    const double cd = std::pow(3.0, 0.5 * d) * std::sqrt(det_base);

    const auto& axis = f.fourier->axis;
    const auto sq1 = [&axis](double xi) { return std::norm(axis[0](xi)); };

    double norm_sq = 0.0;
    if (d == 1) {
        // |2 xi| >= threshold
        const SpectrumTail table(sq1);
        norm_sq = table.tail(threshold / 2.0);
    } else {
        // 4 |xi_1 xi_2| >= threshold: integrate the axis-2 tail mass against
        // axis 1, splitting at the symmetric corner t* = sqrt(threshold)/2.
        const auto sq2 = [&axis](double xi) { return std::norm(axis[1](xi)); };
        const SpectrumTail table2(sq2);
        const auto outer = [&](double t) { return sq1(t) * table2.tail(threshold / (4.0 * t)); };
        const double corner = 0.5 * std::sqrt(threshold);
        const double crude = std::fabs(gauss15_panel(outer, 1e-12, corner));
        const double inner_part =
            integrate_refining(outer, 1e-12, corner, rel_tol * std::max(crude, 1e-300));
        const double outer_part = integrate_tail(outer, corner, rel_tol);
        norm_sq = 2.0 * (inner_part + outer_part);
    }
    if (norm_sq < 0.0) norm_sq = 0.0;
    return cd * std::sqrt(norm_sq / n);
}

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

// OLS of log2(rmse) on log2(n).
inline RateFit fit_rate(std::span<const double> n, std::span<const double> rmse) {
    const std::size_t m = n.size();
    if (m != rmse.size()) throw std::invalid_argument("fit_rate: length mismatch");
    if (m < 4) throw std::invalid_argument("fit_rate: need at least 4 points");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(n[i] > 0.0)) throw std::invalid_argument("fit_rate: n must be positive");
        if (!(rmse[i] > 0.0)) throw std::invalid_argument("fit_rate: rmse must be positive");
        for (std::size_t j = i + 1; j < m; ++j)
            if (n[i] == n[j]) throw std::invalid_argument("fit_rate: n values must be distinct");
    }
    std::vector<double> x(m), y(m);
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = std::log2(n[i]);
        y[i] = std::log2(rmse[i]);
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= static_cast<double>(m);
    ybar /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += r * r;
    }
    fit.slope_stderr = m > 2 ? std::sqrt(ssr / static_cast<double>(m - 2) / sxx) : 0.0;
    return fit;
}

struct RmseStats {
    double rmse = 0.0;
    double rmse_se = 0.0;
};

// rmse = sqrt(mean of squared errors); its standard error by the delta method
// from the sample variance of the squared errors.
inline RmseStats rmse_from_squared_errors(std::span<const double> sq) {
    if (sq.size() < 2) throw std::invalid_argument("rmse_from_squared_errors: need >= 2 replications");
    const double mean_sq = compensated_mean(sq);
    RmseStats out;
    out.rmse = std::sqrt(std::max(0.0, mean_sq));
    NeumaierSum var;
    for (double s : sq) var.add((s - mean_sq) * (s - mean_sq));
    const double sample_var = var.value() / static_cast<double>(sq.size() - 1);
    const double se_mean_sq = std::sqrt(std::max(0.0, sample_var) / static_cast<double>(sq.size()));
    out.rmse_se = out.rmse > 0.0 ? se_mean_sq / (2.0 * out.rmse) : 0.0;
    return out;
}

struct MeanStats {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanStats mean_with_se(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("mean_with_se: need >= 2 samples");
    MeanStats out;
    out.mean = compensated_mean(xs);
    NeumaierSum var;
    for (double x : xs) var.add((x - out.mean) * (x - out.mean));
    out.se = std::sqrt(std::max(0.0, var.value() / static_cast<double>(xs.size() - 1)) /
                       static_cast<double>(xs.size()));
    return out;
}

} // namespace frolov
