#pragma once

// The deterministic Frolov rule Q_{B,v}, its randomized version, and a plain
// Monte Carlo baseline. The randomized rule keeps weight 1/n even when the
// realized node count differs from n; dividing by |P_n| would bias it.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "frolov/lattice.hpp"
#include "frolov/rng.hpp"
#include "frolov/smoothness.hpp"
#include "frolov/summation.hpp"

namespace frolov {

struct Integrand {
    int dim = 0;
    std::function<double(std::span<const double>)> eval;
    bool support_in_domain = false;
    std::optional<double> exact_integral;
    std::optional<SmoothnessSpec> smoothness;
    std::optional<FourierProfile> fourier;
    std::string name;
};

struct EstimateResult {
    double value = 0.0;
    double n = 0.0;
    std::size_t node_count = 0;
    std::optional<Randomization> randomization;
};

// Q_{B,v}(f) = |det B|^{-1} sum_m f(B^{-T}(m+v)), realized over the domain's
// bounding box (f vanishes outside its support, which lies inside dom).
inline double frolov_rule(const Integrand& f, const Matrix& b, std::span<const double> v,
                          const Domain& dom, double cap = kDefaultEnumerationCap) {
    if (!f.support_in_domain)
        throw std::invalid_argument("frolov_rule: integrand must be supported inside the domain");
    if (f.dim != b.dim() || dom.bounding_box.dim() != b.dim())
        throw std::invalid_argument("frolov_rule: dimension mismatch");
    const double det = std::fabs(determinant(b));
    if (det == 0.0) throw std::invalid_argument("frolov_rule: singular matrix");

    NeumaierSum sum;
    detail::enumerate_lattice_images(b.transposed(), v, dom, cap,
                                     [&](std::span<const double> x) { sum.add(f.eval(x)); });
    return sum.value() / det;
}

inline EstimateResult randomized_frolov(const Integrand& f, const ScaledGenerator& gen,
                                        const Randomization& rand, const Domain& dom,
                                        double cap = kDefaultEnumerationCap) {
    if (!f.support_in_domain)
        throw std::invalid_argument("randomized_frolov: integrand must be supported inside the domain");
    if (f.dim != gen.entries.dim())
        throw std::invalid_argument("randomized_frolov: dimension mismatch");

    EstimateResult res;
    res.n = gen.n;
    res.randomization = rand;

    const Matrix a = dilated_generator(gen, rand.dilation).transposed();
    NeumaierSum sum;
    std::size_t count = 0;
    detail::enumerate_lattice_images(a, rand.shift, dom, cap, [&](std::span<const double> x) {
        sum.add(f.eval(x));
        ++count;
    });
    // Weight of Q_{UB_n,v}: the covolume of the realized node lattice,
    // 1/det(U B_n) = 1/(n prod_j u_j). At u = (1,...,1) this is exactly the
    // deterministic rule with B_n.
    double dilation_det = 1.0;
    for (double u : rand.dilation) dilation_det *= u;
    res.value = sum.value() / (gen.n * dilation_det);
    res.node_count = count;
    return res;
}

inline EstimateResult plain_monte_carlo(const Integrand& f, long long n, const Domain& dom,
                                        RandomStream& stream) {
    if (dom.kind != Domain::Kind::unit_cube)
        throw std::invalid_argument("plain_monte_carlo: only the unit cube is supported");
    if (n < 1) throw std::invalid_argument("plain_monte_carlo: n must be >= 1");

    const int d = f.dim;
    Vec x(static_cast<std::size_t>(d));
    NeumaierSum sum;
    for (long long i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = stream.next_double();
        sum.add(f.eval(x));
    }
    EstimateResult res;
    res.value = sum.value() / static_cast<double>(n);
    res.n = static_cast<double>(n);
    res.node_count = static_cast<std::size_t>(n);
    return res;
}

} // namespace frolov
