#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "vacant/rng.hpp"
#include "vacant/torus.hpp"

using namespace vacant;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x[i++] = a;
    return x;
}

// Brute force over all sites and all 3^d periodic images.
std::vector<double> brute_edt(const VoxelSet& v) {
    const int d = v.dim(), n = v.n();
    std::vector<double> out(v.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const IVec ci = v.coords(i);
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (!v.test(j)) continue;
            const IVec cj = v.coords(j);
            double s = 0;
            for (int k = 0; k < d; ++k) {
                int diff = std::abs(ci[k] - cj[k]);
                diff = std::min(diff, n - diff);
                s += double(diff) * diff;
            }
            out[i] = std::min(out[i], std::sqrt(s) / n);
        }
    }
    return out;
}

VoxelSet random_sites(int d, int n, double p, std::uint64_t seed) {
    VoxelSet v(GridSpec::centred(d, n));
    CounterRng rng(seed, Stream::Fixture);
    for (std::size_t i = 0; i < v.size(); ++i) v.set(i, rng.uniform() < p);
    if (v.empty()) v.set(0);
    return v;
}

}  // namespace

TEST_CASE("torus distance examples") {
    CHECK(torus_dist(TorusPoint(vec({0.1, 0, 0})), TorusPoint(vec({0.9, 0, 0}))) == doctest::Approx(0.2));
    CHECK(torus_dist(TorusPoint(vec({0.3, 0.4, 0.5})), TorusPoint(vec({0.3, 0.4, 0.5}))) == 0.0);
    CHECK(torus_dist(TorusPoint(vec({0, 0})), TorusPoint(vec({0.5, 0.5}))) == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK_THROWS(torus_dist(TorusPoint(vec({0, 0})), TorusPoint(vec({0, 0, 0}))));
}

TEST_CASE("points normalize into the unit cube") {
    const TorusPoint p(vec({-0.25, 1.5, 3.0}));
    CHECK(p[0] == doctest::Approx(0.75));
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.0));
    const TorusPoint q = p.translated(vec({0.5, 0.5, -0.1}));
    CHECK(q[0] == doctest::Approx(0.25));
    CHECK(q[2] == doctest::Approx(0.9));
}

TEST_CASE("torus distance is a metric") {
    CounterRng rng(3, Stream::Fixture);
    for (int trial = 0; trial < 2000; ++trial) {
        const int d = 2 + trial % 4;
        auto draw = [&] {
            Vec x(d);
            for (int k = 0; k < d; ++k) x[k] = rng.uniform();
            return TorusPoint(x);
        };
        const TorusPoint x = draw(), y = draw(), z = draw();
        const double xy = torus_dist(x, y);
        CHECK(xy == doctest::Approx(torus_dist(y, x)));
        CHECK(xy <= std::sqrt(double(d)) / 2 + 1e-12);
        CHECK(xy >= 0.0);
        CHECK(xy <= torus_dist(x, z) + torus_dist(z, y) + 1e-12);
    }
}

TEST_CASE("grid points") {
    CHECK(grid_points(GridSpec::centred(2, 2)).size() == 4);
    CHECK(grid_points(GridSpec::centred(3, 3)).size() == 27);
    GridSpec g = GridSpec::centred(2, 4);
    const auto a = grid_points(g);
    g.offset = g.offset + vec({0.1, 0.2});
    const auto b = grid_points(g);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(torus_dist(a[i].translated(vec({0.1, 0.2})), b[i]) < 1e-12);
    CHECK_THROWS(GridSpec::centred(2, 1));
}

TEST_CASE("voxel set basics") {
    VoxelSet v(GridSpec::centred(3, 5));
    CHECK(v.size() == 125);
    v.set(7);
    v.set(99);
    CHECK(v.complement().complement() == v);
    CHECK(v.complement().count() == 123);
    IVec idx(3);
    idx << -1, 5, 2;
    CHECK(v.coords(v.index(idx)) == (IVec(3) << 4, 0, 2).finished());
}

TEST_CASE("distance transform examples") {
    VoxelSet full(GridSpec::centred(3, 4), true);
    for (double x : distance_transform(full)) CHECK(x == 0.0);
    CHECK_THROWS_AS(distance_transform(VoxelSet(GridSpec::centred(2, 4))), NoSitesError);

    VoxelSet one(GridSpec::centred(2, 8));
    one.set(0);
    const auto d1 = distance_transform(one);
    CHECK(d1[one.index((IVec(2) << 4, 4).finished())] == doctest::Approx(std::sqrt(2.0) * 0.5));
    VoxelSet two = one;
    two.set(two.index((IVec(2) << 4, 4).finished()));
    const auto d2 = distance_transform(two);
    CHECK(*std::max_element(d1.begin(), d1.end()) == doctest::Approx(std::sqrt(2.0) * 0.5));
    // Cell (4, 0) is 1/2 from both sites.
    CHECK(*std::max_element(d2.begin(), d2.end()) == doctest::Approx(0.5));
}

TEST_CASE("distance transform matches brute force") {
    int fixtures = 0;
    for (int d = 1; d <= 3; ++d) {
        for (int n : {2, 3, 5, 8, 11, 16}) {
            if (d == 3 && n > 11) continue;
            for (double p : {0.01, 0.1, 0.5}) {
                const VoxelSet v = random_sites(d, n, p, 1000 * d + 10 * n + std::uint64_t(p * 100));
                const auto fast = squared_distance_transform(v);
                const auto slow = brute_edt(v);
                for (std::size_t i = 0; i < v.size(); ++i)
                    REQUIRE(std::sqrt(double(fast[i])) / n == doctest::Approx(slow[i]).epsilon(1e-12));
                ++fixtures;
            }
        }
    }
    // One larger 3-d case.
    const VoxelSet v = random_sites(3, 16, 0.02, 77);
    const auto fast = distance_transform(v, 2);
    const auto slow = brute_edt(v);
    for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
    CHECK(fixtures > 40);
}

TEST_CASE("enlarge and shrink") {
    const VoxelSet v = random_sites(3, 12, 0.03, 5);
    CHECK(enlarge(v, 0.0) == v);
    CHECK(shrink(v, 0.0) == v);
    const VoxelSet w = random_sites(3, 12, 0.03, 6);
    VoxelSet u = v;
    u |= w;
    for (double r : {0.05, 0.1, 0.2}) {
        CHECK(enlarge(v, r).subset_of(enlarge(u, r)));
        CHECK(shrink(u, r + 0.05).subset_of(shrink(u, r)));
    }
    const double diag = std::sqrt(3.0) / 12;
    for (int m = 1; m <= 3; ++m) CHECK(v.subset_of(shrink(enlarge(v, m * diag), m * diag)));
}

TEST_CASE("enlarged voxel ball matches analytic ball") {
    const int n = 256;
    const GridSpec g = GridSpec::centred(2, n);
    auto ball = [&](double r) {
        VoxelSet b(g);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const Vec c = g.centre(b.coords(i));
            b.set(i, (c - Vec::Constant(2, 0.5)).norm() <= r);
        }
        return b;
    };
    const VoxelSet grown = enlarge(ball(0.1), 0.05);
    const VoxelSet target = ball(0.15);
    const double hd = g.half_diagonal();
    for (std::size_t i = 0; i < grown.size(); ++i) {
        if (grown.test(i) == target.test(i)) continue;
        const double r = (g.centre(grown.coords(i)) - Vec::Constant(2, 0.5)).norm();
        CHECK(std::abs(r - 0.15) <= 2 * hd);
    }
}

TEST_CASE("voxel set binary round trip") {
    const VoxelSet v = random_sites(3, 7, 0.3, 9);
    std::stringstream ss;
    write_voxelset(ss, v);
    CHECK(ss.str().substr(0, 4) == "VXST");
    CHECK(ss.str().size() == 4 + 4 * 3 + 8 * 3 + 8 + (343 + 7) / 8);
    const VoxelSet w = read_voxelset(ss);
    CHECK(w == v);
    std::stringstream bad("XXXX");
    CHECK_THROWS(read_voxelset(bad));
}
