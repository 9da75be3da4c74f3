#include "doctest.h"

#include <cmath>
#include <vector>

#include "frolov/analysis.hpp"
#include "frolov/lattice.hpp"

using namespace frolov;

namespace {

// Independent enumeration oracle: scan every m in a generously padded sup-norm
// ball and filter by membership. Only usable for small n.
std::vector<double> naive_nodes(const ScaledGenerator& gen, const Randomization& rand,
                                const Domain& dom) {
    const int d = gen.entries.dim();
    const Matrix a = dilated_generator(gen, rand.dilation).transposed();
    const Matrix ainv = inverse(a);
    double row_sum_max = 0.0;
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j)
            s += std::fabs(a(i, j)) *
                 std::max(std::fabs(dom.bounding_box.lo[static_cast<std::size_t>(j)]),
                          std::fabs(dom.bounding_box.hi[static_cast<std::size_t>(j)]));
        row_sum_max = std::max(row_sum_max, s);
    }
    const long long radius =
        static_cast<long long>(10.0 * (std::pow(gen.n, 1.0 / d) + 1.0) + row_sum_max + 2.0);

    std::vector<double> coords;
    std::vector<long long> m(static_cast<std::size_t>(d), -radius);
    Vec z(static_cast<std::size_t>(d));
    for (;;) {
        for (int i = 0; i < d; ++i)
            z[static_cast<std::size_t>(i)] =
                static_cast<double>(m[static_cast<std::size_t>(i)]) + rand.shift[static_cast<std::size_t>(i)];
        const Vec x = ainv.apply(z);
        if (dom.membership(x)) coords.insert(coords.end(), x.begin(), x.end());
        int level = d - 1;
        while (level >= 0) {
            if (++m[static_cast<std::size_t>(level)] <= radius) break;
            m[static_cast<std::size_t>(level)] = -radius;
            --level;
        }
        if (level < 0) break;
    }
    detail::sort_nodes_lexicographic(d, coords);
    return coords;
}

Randomization fixed_randomization(Vec u, Vec v) {
    Randomization r;
    r.dilation = std::move(u);
    r.shift = std::move(v);
    return r;
}

} // namespace

TEST_CASE("d=1 unit generator gives the shifted equispaced grid") {
    const ScaledGenerator gen = scale(build_generator(1, 10), 10.0);
    const NodeSet ns =
        enumerate_nodes(gen, fixed_randomization({1.0}, {0.5}), Domain::unit_cube(1));
    REQUIRE(ns.size() == 10);
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(ns.coords[i] == doctest::Approx(0.05 + 0.1 * static_cast<double>(i)).epsilon(1e-14));
    CHECK(ns.weight * ns.n == 1.0);
}

TEST_CASE("d=1 with spacing beyond the domain yields no nodes") {
    const ScaledGenerator gen = scale(build_generator(1, 10), 0.4);
    const NodeSet ns =
        enumerate_nodes(gen, fixed_randomization({1.5}, {0.9}), Domain::unit_cube(1));
    CHECK(ns.size() == 0);
}

TEST_CASE("enumeration agrees with the naive oracle") {
    SUBCASE("d=1") {
        const FrolovMatrix base = build_generator(1, 10);
        for (double n : {7.0, 37.5, 160.0}) {
            const ScaledGenerator gen = scale(base, n);
            RandomStream stream(derive_stream_seed(11, 0, static_cast<std::uint64_t>(n)), 0);
            const Randomization rand = draw_randomization(stream, 1);
            const Domain dom = Domain::unit_cube(1);
            const NodeSet ns = enumerate_nodes(gen, rand, dom);
            const std::vector<double> oracle = naive_nodes(gen, rand, dom);
            REQUIRE(ns.coords.size() == oracle.size());
            for (std::size_t i = 0; i < oracle.size(); ++i)
                CHECK(std::fabs(ns.coords[i] - oracle[i]) <= 1e-12);
        }
    }
    SUBCASE("d=2 on the unit cube") {
        const FrolovMatrix base = build_generator(2, 30);
        for (std::uint64_t rep : {0ull, 1ull, 2ull, 3ull}) {
            const ScaledGenerator gen = scale(base, 200.0);
            RandomStream stream(derive_stream_seed(12, 0, rep), rep);
            const Randomization rand = draw_randomization(stream, 2);
            const Domain dom = Domain::unit_cube(2);
            const NodeSet ns = enumerate_nodes(gen, rand, dom);
            const std::vector<double> oracle = naive_nodes(gen, rand, dom);
            REQUIRE(ns.coords.size() == oracle.size());
            for (std::size_t i = 0; i < oracle.size(); ++i)
                CHECK(std::fabs(ns.coords[i] - oracle[i]) <= 1e-12);
        }
    }
    SUBCASE("d=2 on a general domain (disk)") {
        const FrolovMatrix base = build_generator(2, 30);
        const ScaledGenerator gen = scale(base, 150.0);
        Domain disk;
        disk.kind = Domain::Kind::general;
        disk.bounding_box = AxisBox{{0.0, 0.0}, {1.0, 1.0}};
        disk.volume = 3.14159265358979323846 / 4.0;
        disk.membership = [](std::span<const double> x) {
            const double dx = x[0] - 0.5, dy = x[1] - 0.5;
            return dx * dx + dy * dy <= 0.25;
        };
        RandomStream stream(derive_stream_seed(13, 0, 0), 0);
        const Randomization rand = draw_randomization(stream, 2);
        const NodeSet ns = enumerate_nodes(gen, rand, disk);
        const std::vector<double> oracle = naive_nodes(gen, rand, disk);
        REQUIRE(ns.coords.size() == oracle.size());
        CHECK(ns.size() > 0);
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(std::fabs(ns.coords[i] - oracle[i]) <= 1e-12);
    }
}

TEST_CASE("nodes are distinct and inside the domain") {
    const ScaledGenerator gen = scale(build_generator(2, 30), 300.0);
    RandomStream stream(derive_stream_seed(21, 0, 5), 5);
    const Randomization rand = draw_randomization(stream, 2);
    const Domain dom = Domain::unit_cube(2);
    const NodeSet ns = enumerate_nodes(gen, rand, dom);
    REQUIRE(ns.size() > 0);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto x = ns.node(i);
        CHECK(dom.membership(x));
        if (i > 0) {
            const auto prev = ns.node(i - 1);
            double dist = 0.0;
            for (int j = 0; j < 2; ++j)
                dist = std::max(dist, std::fabs(x[static_cast<std::size_t>(j)] -
                                                prev[static_cast<std::size_t>(j)]));
            CHECK(dist > 0.0);
        }
    }
}

TEST_CASE("expected node count matches n (d=2, R=10^4)") {
    const ScaledGenerator gen = scale(build_generator(2, 30), 1000.0);
    const Domain dom = Domain::unit_cube(2);
    std::vector<double> counts;
    counts.reserve(10000);
    for (std::uint64_t rep = 0; rep < 10000; ++rep) {
        RandomStream stream(derive_stream_seed(42, 0, rep), rep);
        const Randomization rand = draw_randomization(stream, 2);
        counts.push_back(static_cast<double>(enumerate_nodes(gen, rand, dom).size()));
    }
    const MeanStats ms = mean_with_se(counts);
    CHECK(std::fabs(ms.mean - 1000.0) <= 3.0 * ms.se);
}

TEST_CASE("enumeration cap triggers with a diagnostic") {
    const ScaledGenerator gen = scale(build_generator(2, 30), 10000.0);
    RandomStream stream(derive_stream_seed(3, 0, 0), 0);
    const Randomization rand = draw_randomization(stream, 2);
    CHECK_THROWS_AS(enumerate_nodes(gen, rand, Domain::unit_cube(2), 1000.0),
                    EnumerationCapError);
}

TEST_CASE("dual-lattice box counting") {
    SUBCASE("d=1: box [0, 2n] holds exactly the two points n and 2n") {
        const ScaledGenerator gen = scale(build_generator(1, 10), 12.0);
        const AxisBox box{{0.0}, {24.0}};
        CHECK(count_dual_in_box(gen, box) == 2);
        // bound d_B*vol/n = 2 is tight
        CHECK(2.0 <= gen.base.det_abs * box.volume() / gen.n + 1e-9);
    }
    SUBCASE("volume below n/d_B forces an empty box") {
        const FrolovMatrix base = build_generator(2, 30);
        const ScaledGenerator gen = scale(base, 300.0);
        RandomStream stream(derive_stream_seed(5, 0, 0), 0);
        for (int i = 0; i < 50; ++i) {
            const double vol = 0.9 * gen.n / base.det_abs;
            const double w1 = std::exp(stream.next_double() * std::log(vol));
            const double w2 = vol / w1;
            const double t1 = stream.next_double(), t2 = stream.next_double();
            const AxisBox box{{-t1 * w1, -t2 * w2}, {(1.0 - t1) * w1, (1.0 - t2) * w2}};
            CHECK(count_dual_in_box(gen, box) == 0);
        }
    }
    SUBCASE("lemma bound over random origin boxes (d=2, n=500)") {
        const FrolovMatrix base = build_generator(2, 30);
        const ScaledGenerator gen = scale(base, 500.0);
        RandomStream stream(derive_stream_seed(6, 0, 0), 0);
        for (int i = 0; i < 1000; ++i) {
            const double lo = std::log(0.01 * gen.n / base.det_abs);
            const double hi = std::log(50.0 * gen.n);
            const double vol = std::exp(lo + (hi - lo) * stream.next_double());
            const double gamma = 0.2 + 0.6 * stream.next_double();
            const double w1 = std::pow(vol, gamma);
            const double w2 = vol / w1;
            const double t1 = stream.next_double(), t2 = stream.next_double();
            const AxisBox box{{-t1 * w1, -t2 * w2}, {(1.0 - t1) * w1, (1.0 - t2) * w2}};
            const long long count = count_dual_in_box(gen, box);
            CHECK(static_cast<double>(count) <= base.det_abs * box.volume() / gen.n + 1e-9);
            if (box.volume() < gen.n / base.det_abs) CHECK(count == 0);
        }
    }
    SUBCASE("box must contain the origin") {
        const ScaledGenerator gen = scale(build_generator(2, 30), 100.0);
        CHECK_THROWS_AS(count_dual_in_box(gen, AxisBox{{1.0, -1.0}, {2.0, 1.0}}),
                        std::invalid_argument);
    }
}

TEST_CASE("draw_randomization determinism and distribution") {
    SUBCASE("identical (seed, index) gives identical draws bit for bit") {
        RandomStream a(derive_stream_seed(99, 0, 7), 7);
        RandomStream b(derive_stream_seed(99, 0, 7), 7);
        const Randomization ra = draw_randomization(a, 3);
        const Randomization rb = draw_randomization(b, 3);
        for (int j = 0; j < 3; ++j) {
            CHECK(ra.dilation[static_cast<std::size_t>(j)] == rb.dilation[static_cast<std::size_t>(j)]);
            CHECK(ra.shift[static_cast<std::size_t>(j)] == rb.shift[static_cast<std::size_t>(j)]);
        }
        CHECK(ra.replication == 7);
    }
    SUBCASE("ranges and means over 10^5 draws") {
        double usum[2] = {0.0, 0.0}, vsum[2] = {0.0, 0.0};
        const int draws = 100000;
        for (int rep = 0; rep < draws; ++rep) {
            RandomStream s(derive_stream_seed(123, 0, static_cast<std::uint64_t>(rep)), 0);
            const Randomization r = draw_randomization(s, 2);
            for (int j = 0; j < 2; ++j) {
                REQUIRE(r.dilation[static_cast<std::size_t>(j)] >= 0.5);
                REQUIRE(r.dilation[static_cast<std::size_t>(j)] <= 1.5);
                REQUIRE(r.shift[static_cast<std::size_t>(j)] >= 0.0);
                REQUIRE(r.shift[static_cast<std::size_t>(j)] < 1.0);
                usum[j] += r.dilation[static_cast<std::size_t>(j)];
                vsum[j] += r.shift[static_cast<std::size_t>(j)];
            }
        }
        for (int j = 0; j < 2; ++j) {
            CHECK(std::fabs(usum[j] / draws - 1.0) <= 0.01);
            CHECK(std::fabs(vsum[j] / draws - 0.5) <= 0.01);
        }
    }
}
