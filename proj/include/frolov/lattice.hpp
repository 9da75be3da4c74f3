#pragma once

// Realized node sets P_n = Omega ∩ (U B_n)^{-T}(Z^d + v) and dual-lattice
// box counting. Enumeration walks the integer candidate box obtained from the
// image of Omega's bounding box and filters by membership; nothing satisfying
// the defining condition can be skipped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "frolov/generator.hpp"
#include "frolov/linalg.hpp"
#include "frolov/rng.hpp"

namespace frolov {

inline constexpr double kDefaultEnumerationCap = 1e9;

struct Randomization {
    Vec dilation; // u, componentwise uniform on [1/2, 3/2]
    Vec shift;    // v, componentwise uniform on [0, 1)
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
};

struct AxisBox {
    Vec lo;
    Vec hi;
    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const {
        double v = 1.0;
        for (std::size_t j = 0; j < lo.size(); ++j) v *= hi[j] - lo[j];
        return v;
    }
    bool contains_origin() const {
        for (std::size_t j = 0; j < lo.size(); ++j)
            if (lo[j] > 0.0 || hi[j] < 0.0) return false;
        return true;
    }
};

struct Domain {
    enum class Kind { unit_cube, general };
    Kind kind = Kind::unit_cube;
    std::function<bool(std::span<const double>)> membership;
    AxisBox bounding_box;
    double volume = 1.0;

    static Domain unit_cube(int d) {
        Domain dom;
        dom.kind = Kind::unit_cube;
        dom.bounding_box = AxisBox{Vec(static_cast<std::size_t>(d), 0.0),
                                   Vec(static_cast<std::size_t>(d), 1.0)};
        dom.volume = 1.0;
        dom.membership = [d](std::span<const double> x) {
            for (int j = 0; j < d; ++j)
                if (x[static_cast<std::size_t>(j)] < 0.0 || x[static_cast<std::size_t>(j)] > 1.0)
                    return false;
            return true;
        };
        return dom;
    }
};

struct NodeSet {
    int dim = 0;
    std::vector<double> coords; // row-major |nodes| x dim, lexicographically sorted
    double weight = 0.0;        // always 1/n (NOT 1/|nodes|)
    double n = 0.0;
    Randomization randomization;

    std::size_t size() const { return dim > 0 ? coords.size() / dim : 0; }
    std::span<const double> node(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

struct EnumerationCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Axis-aligned bounding box of A(box): per output coordinate, sum the
// per-column min/max contributions.
inline AxisBox image_bounding_box(const Matrix& a, const AxisBox& box) {
    const int d = a.dim();
    AxisBox out{Vec(static_cast<std::size_t>(d), 0.0), Vec(static_cast<std::size_t>(d), 0.0)};
    for (int i = 0; i < d; ++i) {
        double lo = 0.0, hi = 0.0;
        for (int j = 0; j < d; ++j) {
            const double p = a(i, j) * box.lo[static_cast<std::size_t>(j)];
            const double q = a(i, j) * box.hi[static_cast<std::size_t>(j)];
            lo += std::min(p, q);
            hi += std::max(p, q);
        }
        out.lo[static_cast<std::size_t>(i)] = lo;
        out.hi[static_cast<std::size_t>(i)] = hi;
    }
    return out;
}

struct IntRange {
    long long lo;
    long long hi; // inclusive; empty if lo > hi
};

// Casting unbounded spans to integers is undefined; anything this wide is far
// beyond every supported cap anyway.
inline IntRange checked_range(double lo, double hi, const char* who) {
    if (hi - lo > 4.5e15)
        throw EnumerationCapError(std::string(who) +
                                  ": candidate range too wide to enumerate");
    return IntRange{static_cast<long long>(std::ceil(lo)), static_cast<long long>(std::floor(hi))};
}

inline void check_candidate_cap(std::span<const IntRange> ranges, double cap,
                                const char* who) {
    double count = 1.0;
    for (const auto& r : ranges) {
        if (r.hi < r.lo) return; // empty box
        count *= static_cast<double>(r.hi - r.lo + 1);
    }
    if (count > cap)
        throw EnumerationCapError(std::string(who) + ": candidate box of " +
                                  std::to_string(count) + " integer vectors exceeds cap " +
                                  std::to_string(cap));
}

// Candidate integer ranges for m with m + v inside [lo, hi] per coordinate,
// padded so border cases are decided by the membership filter, not the box.
inline std::vector<IntRange> candidate_ranges(const AxisBox& image, std::span<const double> v) {
    const int d = image.dim();
    std::vector<IntRange> r(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const double pad = 1e-9 * (1.0 + std::fabs(image.lo[static_cast<std::size_t>(i)]) +
                                   std::fabs(image.hi[static_cast<std::size_t>(i)]));
        const double vlo = image.lo[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i)] - pad;
        const double vhi = image.hi[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i)] + pad;
        r[static_cast<std::size_t>(i)] = checked_range(vlo, vhi, "enumerate_nodes");
    }
    return r;
}

// Enumerate x = A^{-1}(m + v) over the candidate box, keep membership(x).
// Kernel shared by node enumeration and the deterministic rule.
inline void enumerate_lattice_images(const Matrix& a, std::span<const double> v,
                                     const Domain& dom, double cap,
                                     const std::function<void(std::span<const double>)>& emit) {
    const int d = a.dim();
    const AxisBox image = image_bounding_box(a, dom.bounding_box);
    const std::vector<IntRange> ranges = candidate_ranges(image, v);
    check_candidate_cap(ranges, cap, "enumerate_nodes");
    for (const auto& r : ranges)
        if (r.hi < r.lo) return;

    const Matrix ainv = inverse(a);
    std::vector<long long> m(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)] = ranges[static_cast<std::size_t>(i)].lo;
    Vec z(static_cast<std::size_t>(d));
    Vec x(static_cast<std::size_t>(d));
    for (;;) {
        for (int i = 0; i < d; ++i)
            z[static_cast<std::size_t>(i)] = static_cast<double>(m[static_cast<std::size_t>(i)]) +
                                             v[static_cast<std::size_t>(i)];
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += ainv(i, j) * z[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s;
        }
        if (dom.membership(x)) emit(x);

        int level = d - 1;
        while (level >= 0) {
            if (++m[static_cast<std::size_t>(level)] <= ranges[static_cast<std::size_t>(level)].hi) break;
            m[static_cast<std::size_t>(level)] = ranges[static_cast<std::size_t>(level)].lo;
            --level;
        }
        if (level < 0) break;
    }
}

inline void sort_nodes_lexicographic(int d, std::vector<double>& coords) {
    const std::size_t count = coords.size() / static_cast<std::size_t>(d);
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (int j = 0; j < d; ++j) {
            const double xa = coords[a * d + static_cast<std::size_t>(j)];
            const double xb = coords[b * d + static_cast<std::size_t>(j)];
            if (xa != xb) return xa < xb;
        }
        return false;
    });
    std::vector<double> sorted(coords.size());
    for (std::size_t i = 0; i < count; ++i)
        for (int j = 0; j < d; ++j)
            sorted[i * d + static_cast<std::size_t>(j)] = coords[order[i] * d + static_cast<std::size_t>(j)];
    coords.swap(sorted);
}

} // namespace detail

// Matrix of the dilated, scaled generator: U B_n with U = diag(u).
inline Matrix dilated_generator(const ScaledGenerator& gen, std::span<const double> u) {
    const int d = gen.entries.dim();
    Matrix ub = gen.entries;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) ub(i, j) *= u[static_cast<std::size_t>(i)];
    return ub;
}

inline NodeSet enumerate_nodes(const ScaledGenerator& gen, const Randomization& rand,
                               const Domain& dom, double cap = kDefaultEnumerationCap) {
    const int d = gen.entries.dim();
    if (static_cast<int>(rand.dilation.size()) != d || static_cast<int>(rand.shift.size()) != d)
        throw std::invalid_argument("enumerate_nodes: randomization dimension mismatch");
    if (dom.bounding_box.dim() != d)
        throw std::invalid_argument("enumerate_nodes: domain dimension mismatch");

    NodeSet out;
    out.dim = d;
    out.n = gen.n;
    out.weight = 1.0 / gen.n;
    out.randomization = rand;

    const Matrix a = dilated_generator(gen, rand.dilation).transposed();
    detail::enumerate_lattice_images(a, rand.shift, dom, cap,
                                     [&](std::span<const double> x) {
                                         out.coords.insert(out.coords.end(), x.begin(), x.end());
                                     });
    detail::sort_nodes_lexicographic(d, out.coords);
    return out;
}

// |B_n(Z^d \ {0}) ∩ box| for an axis-parallel box containing the origin.
inline long long count_dual_in_box(const ScaledGenerator& gen, const AxisBox& box,
                                   double cap = kDefaultEnumerationCap) {
    const int d = gen.entries.dim();
    if (box.dim() != d) throw std::invalid_argument("count_dual_in_box: dimension mismatch");
    if (!box.contains_origin())
        throw std::invalid_argument("count_dual_in_box: box must contain the origin");

    const Matrix inv = inverse(gen.entries);
    const AxisBox pre = detail::image_bounding_box(inv, box);
    std::vector<detail::IntRange> ranges(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const double pad = 1e-9 * (1.0 + std::fabs(pre.lo[static_cast<std::size_t>(i)]) +
                                   std::fabs(pre.hi[static_cast<std::size_t>(i)]));
        ranges[static_cast<std::size_t>(i)] =
            detail::checked_range(pre.lo[static_cast<std::size_t>(i)] - pad,
                                  pre.hi[static_cast<std::size_t>(i)] + pad, "count_dual_in_box");
    }
    detail::check_candidate_cap(ranges, cap, "count_dual_in_box");
    for (const auto& r : ranges)
        if (r.hi < r.lo) return 0;

    long long count = 0;
    std::vector<long long> m(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)] = ranges[static_cast<std::size_t>(i)].lo;
    for (;;) {
        bool zero = true;
        for (int i = 0; i < d; ++i) zero = zero && m[static_cast<std::size_t>(i)] == 0;
        if (!zero) {
            bool inside = true;
            for (int i = 0; i < d && inside; ++i) {
                double y = 0.0;
                for (int j = 0; j < d; ++j)
                    y += gen.entries(i, j) * static_cast<double>(m[static_cast<std::size_t>(j)]);
                inside = box.lo[static_cast<std::size_t>(i)] <= y && y <= box.hi[static_cast<std::size_t>(i)];
            }
            if (inside) ++count;
        }
        int level = d - 1;
        while (level >= 0) {
            if (++m[static_cast<std::size_t>(level)] <= ranges[static_cast<std::size_t>(level)].hi) break;
            m[static_cast<std::size_t>(level)] = ranges[static_cast<std::size_t>(level)].lo;
            --level;
        }
        if (level < 0) break;
    }
    return count;
}

// u on [1/2,3/2]^d then v on [0,1)^d, in that order; identical streams give
// identical output bit-for-bit.
inline Randomization draw_randomization(RandomStream& stream, int d) {
    Randomization r;
    r.seed = stream.seed();
    r.replication = stream.replication();
    r.dilation.resize(static_cast<std::size_t>(d));
    r.shift.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) r.dilation[static_cast<std::size_t>(j)] = 0.5 + stream.next_double();
    for (int j = 0; j < d; ++j) r.shift[static_cast<std::size_t>(j)] = stream.next_double();
    return r;
}

} // namespace frolov
