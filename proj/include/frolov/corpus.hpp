#pragma once

// Test integrands with known integrals, smoothness classification and (where
// available) closed-form Fourier transforms. All corpus functions are tensor
// products over coordinates, which the Fourier profiles expose per axis.

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frolov/cubature.hpp"
#include "frolov/transform.hpp"

namespace frolov {

namespace detail {

inline double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Cardinal B-spline of order r, supported on [0, r]:
// b_r(x) = (1/(r-1)!) sum_k (-1)^k C(r,k) (x-k)_+^{r-1}.
inline double cardinal_bspline(int r, double x) {
    if (x <= 0.0 || x >= r) return 0.0;
    if (r == 1) return 1.0;
    double fact = 1.0;
    for (int i = 2; i < r; ++i) fact *= i;
    double s = 0.0;
    for (int k = 0; k <= r; ++k) {
        const double t = x - k;
        if (t <= 0.0) break;
        double p = 1.0;
        for (int i = 0; i < r - 1; ++i) p *= t;
        s += ((k % 2 == 0) ? 1.0 : -1.0) * binomial(r, k) * p;
    }
    return s / fact;
}

inline std::complex<double> unit_sinc(double z) {
    if (z == 0.0) return 1.0;
    return std::sin(z) / z;
}

// Fourier transform of x -> b_r(s x):
// (1/s) e^{-i pi r xi / s} (sin(pi xi / s) / (pi xi / s))^r.
inline std::complex<double> scaled_bspline_fourier(int r, double s, double xi) {
    const double z = std::numbers::pi * xi / s;
    std::complex<double> pw = 1.0;
    const std::complex<double> sc = unit_sinc(z);
    for (int i = 0; i < r; ++i) pw *= sc;
    const double phase = -std::numbers::pi * r * xi / s;
    return (1.0 / s) * std::complex<double>(std::cos(phase), std::sin(phase)) * pw;
}

// Fourier transform of the indicator of [a, b]:
// (b-a) e^{-i pi xi (a+b)} sinc(pi xi (b-a)).
inline std::complex<double> interval_indicator_fourier(double a, double b, double xi) {
    const double phase = -std::numbers::pi * xi * (a + b);
    return (b - a) * std::complex<double>(std::cos(phase), std::sin(phase)) *
           unit_sinc(std::numbers::pi * xi * (b - a));
}

struct AxisFunction {
    std::function<double(double)> eval;
    std::function<std::complex<double>(double)> fourier; // empty if unknown
    double integral = 0.0;
};

inline Integrand make_tensor(std::string name, int d, std::vector<AxisFunction> axes,
                             bool support_in_domain) {
    Integrand f;
    f.name = std::move(name);
    f.dim = d;
    f.support_in_domain = support_in_domain;

    double exact = 1.0;
    for (const auto& ax : axes) exact *= ax.integral;
    f.exact_integral = exact;

    auto ax_evals = std::make_shared<std::vector<std::function<double(double)>>>();
    for (const auto& ax : axes) ax_evals->push_back(ax.eval);
    f.eval = [ax_evals](std::span<const double> x) {
        double p = 1.0;
        for (std::size_t j = 0; j < ax_evals->size(); ++j) {
            p *= (*ax_evals)[j](x[j]);
            if (p == 0.0) return 0.0;
        }
        return p;
    };

    bool all_fourier = true;
    for (const auto& ax : axes) all_fourier = all_fourier && static_cast<bool>(ax.fourier);
    if (all_fourier) {
        FourierProfile prof;
        for (const auto& ax : axes) prof.axis.push_back(ax.fourier);
        auto factors = std::make_shared<std::vector<std::function<std::complex<double>(double)>>>(prof.axis);
        prof.eval = [factors](std::span<const double> xi) {
            std::complex<double> p = 1.0;
            for (std::size_t j = 0; j < factors->size(); ++j) p *= (*factors)[j](xi[j]);
            return p;
        };
        f.fourier = std::move(prof);
    }
    return f;
}

inline double param_double(const std::map<std::string, std::string>& params,
                           const std::string& key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw std::invalid_argument("get_integrand: bad numeric value for param '" + key + "'");
    }
}

// Scalar broadcast ("0.5") or per-axis 'x'-separated list ("0x0.25").
inline Vec param_vec(const std::map<std::string, std::string>& params,
                     const std::string& key, int d, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return Vec(static_cast<std::size_t>(d), fallback);
    const std::string& s = it->second;
    Vec out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find('x', pos);
        const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::invalid_argument("get_integrand: bad vector value for param '" + key + "'");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.size() == 1) return Vec(static_cast<std::size_t>(d), out[0]);
    if (static_cast<int>(out.size()) != d)
        throw std::invalid_argument("get_integrand: param '" + key + "' has wrong length");
    return out;
}

} // namespace detail

// The nominal smoothness of an order-r B-spline ladder at p=2 sits just below
// the membership threshold r - 1/2.
inline constexpr double kSmoothnessEps = 0.05;

inline Integrand get_integrand(const std::string& name, int d,
                               const std::map<std::string, std::string>& params = {}) {
    if (d < 1) throw std::invalid_argument("get_integrand: d must be >= 1");

    if (name == "bspline_tensor") {
        const int r = static_cast<int>(detail::param_double(params, "r", 3.0));
        if (r < 1) throw std::invalid_argument("get_integrand: bspline_tensor needs r >= 1");
        detail::AxisFunction ax;
        ax.eval = [r](double x) { return r * detail::cardinal_bspline(r, r * x); };
        ax.fourier = [r](double xi) {
            return static_cast<double>(r) * detail::scaled_bspline_fourier(r, r, xi);
        };
        ax.integral = 1.0;
        Integrand f = detail::make_tensor("bspline_tensor", d,
                                          std::vector<detail::AxisFunction>(static_cast<std::size_t>(d), ax),
                                          true);
        f.smoothness = SmoothnessSpec{Vec(static_cast<std::size_t>(d), r - 0.5 - kSmoothnessEps),
                                      2.0, SmoothnessMode::mixed};
        f.fourier->decay_note = "|xi|^-" + std::to_string(r) + " per axis";
        return f;
    }

    if (name == "hat_tensor") {
        detail::AxisFunction ax;
        ax.eval = [](double x) { return std::max(0.0, 1.0 - std::fabs(2.0 * x - 1.0)); };
        ax.fourier = [](double xi) { return detail::scaled_bspline_fourier(2, 2.0, xi); };
        ax.integral = 0.5;
        Integrand f = detail::make_tensor("hat_tensor", d,
                                          std::vector<detail::AxisFunction>(static_cast<std::size_t>(d), ax),
                                          true);
        f.smoothness = SmoothnessSpec{Vec(static_cast<std::size_t>(d), 1.5 - kSmoothnessEps),
                                      2.0, SmoothnessMode::mixed};
        f.fourier->decay_note = "|xi|^-2 per axis";
        return f;
    }

    if (name == "bump_tensor") {
        detail::AxisFunction ax;
        ax.eval = [](double x) { return bump_weight(x); };
        ax.integral = BumpCdfTable::instance().normalization();
        return detail::make_tensor("bump_tensor", d,
                                   std::vector<detail::AxisFunction>(static_cast<std::size_t>(d), ax),
                                   true);
    }

    if (name == "box_indicator") {
        const Vec a = detail::param_vec(params, "a", d, 0.0);
        const Vec b = detail::param_vec(params, "b", d, 0.5);
        std::vector<detail::AxisFunction> axes;
        for (int j = 0; j < d; ++j) {
            const double aj = a[static_cast<std::size_t>(j)];
            const double bj = b[static_cast<std::size_t>(j)];
            if (!(0.0 <= aj && aj < bj && bj <= 1.0))
                throw std::invalid_argument("get_integrand: box_indicator needs 0 <= a < b <= 1");
            detail::AxisFunction ax;
            ax.eval = [aj, bj](double x) { return (aj <= x && x <= bj) ? 1.0 : 0.0; };
            ax.fourier = [aj, bj](double xi) { return detail::interval_indicator_fourier(aj, bj, xi); };
            ax.integral = bj - aj;
            axes.push_back(std::move(ax));
        }
        Integrand f = detail::make_tensor("box_indicator", d, std::move(axes), true);
        f.smoothness = SmoothnessSpec{Vec(static_cast<std::size_t>(d), 0.45), 2.0, SmoothnessMode::mixed};
        f.fourier->decay_note = "|xi|^-1 per axis (too slow for tail sums)";
        return f;
    }

    if (name == "poly_nobc") {
        detail::AxisFunction ax;
        ax.eval = [](double x) { return x; };
        ax.integral = 0.5;
        Integrand f = detail::make_tensor("poly_nobc", d,
                                          std::vector<detail::AxisFunction>(static_cast<std::size_t>(d), ax),
                                          false);
        f.fourier.reset();
        return f;
    }

    throw std::invalid_argument("get_integrand: unknown integrand '" + name + "'");
}

struct CorpusEntry {
    std::string name;
    std::string params;
    std::string smoothness;
    std::string exact;
};

inline std::vector<CorpusEntry> corpus_list() {
    return {
        {"bspline_tensor", "r (order, default 3)",
         "mixed, s = r - 0.55, p = 2", "1"},
        {"hat_tensor", "-", "mixed, s = 1.45, p = 2", "(1/2)^d"},
        {"bump_tensor", "-", "C-infinity, compactly supported", "c^d (bump normalization)"},
        {"box_indicator", "a, b (scalar or 'x'-separated, default 0, 0.5)",
         "mixed, s = 0.45, p = 2", "prod (b_j - a_j)"},
        {"poly_nobc", "-", "C-infinity, no boundary decay (needs --boundary-free)", "2^-d"},
    };
}

// "name" or "name:k=v,k=v" -> (name, params)
inline std::pair<std::string, std::map<std::string, std::string>>
parse_integrand_spec(const std::string& spec) {
    const std::size_t colon = spec.find(':');
    std::pair<std::string, std::map<std::string, std::string>> out;
    out.first = spec.substr(0, colon);
    if (colon == std::string::npos) return out;
    std::size_t pos = colon + 1;
    while (pos < spec.size()) {
        std::size_t comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        const std::string kv = spec.substr(pos, comma - pos);
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("parse_integrand_spec: expected k=v in '" + kv + "'");
        out.second[kv.substr(0, eq)] = kv.substr(eq + 1);
        pos = comma + 1;
    }
    return out;
}

} // namespace frolov
