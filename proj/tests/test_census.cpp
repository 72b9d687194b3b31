#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "vacant/census.hpp"
#include "vacant/ldpmath.hpp"
#include "vacant/rng.hpp"

using namespace vacant;

namespace {

// Union-find with offsets: every cell stores its displacement (in whole
// periods) relative to its parent. An edge inside one tree closes a cycle
// whose displacement is the discrepancy; the wrap axes are the union of
// their supports.
struct OffsetUnionFind {
    int d;
    std::vector<std::size_t> parent;
    std::vector<std::vector<int>> off;  // displacement of cell relative to parent

    OffsetUnionFind(std::size_t size, int d_) : d(d_), parent(size), off(size, std::vector<int>(d_, 0)) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }

    // Root and displacement of i relative to the root.
    std::size_t find(std::size_t i, std::vector<int>& disp) {
        disp.assign(d, 0);
        while (parent[i] != i) {
            for (int k = 0; k < d; ++k) disp[k] += off[i][k];
            i = parent[i];
        }
        return i;
    }
};

struct Oracle {
    std::vector<std::size_t> root;  // per cell, SIZE_MAX outside
    std::map<std::size_t, unsigned> wrap;
};

Oracle oracle_label(const VoxelSet& v) {
    const int d = v.dim();
    const int n = v.n();
    OffsetUnionFind uf(v.size(), d);
    std::vector<unsigned> wrap_of(v.size(), 0);
    std::vector<int> di, dj;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v.test(i)) continue;
        const IVec c = v.coords(i);
        for (int k = 0; k < d; ++k) {
            IVec q = c;
            q[k] += 1;
            const int cross = q[k] == n ? 1 : 0;
            const std::size_t j = v.index(q);
            if (!v.test(j)) continue;
            // lift(j) = lift(i) + e_k, in periods: cross along axis k
            const std::size_t ri = uf.find(i, di);
            const std::size_t rj = uf.find(j, dj);
            std::vector<int> want(d);
            for (int a = 0; a < d; ++a) want[a] = di[a] + (a == k ? cross : 0);
            if (ri == rj) {
                for (int a = 0; a < d; ++a)
                    if (dj[a] != want[a]) wrap_of[ri] |= 1u << a;
            } else {
                // place rj so that j sits at want relative to ri
                uf.parent[rj] = ri;
                for (int a = 0; a < d; ++a) uf.off[rj][a] = want[a] - dj[a];
                wrap_of[ri] |= wrap_of[rj];
            }
        }
    }
    Oracle o;
    o.root.assign(v.size(), SIZE_MAX);
    std::vector<int> tmp;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v.test(i)) continue;
        o.root[i] = uf.find(i, tmp);
        o.wrap[o.root[i]] = wrap_of[o.root[i]];
    }
    return o;
}

VoxelSet random_set(int d, int n, double p, std::uint64_t seed) {
    VoxelSet v(GridSpec::centred(d, n));
    CounterRng rng(seed, Stream::Fixture);
    for (std::size_t i = 0; i < v.size(); ++i) v.set(i, rng.uniform() < p);
    return v;
}

void check_against_oracle(const VoxelSet& v) {
    const Labeling lab = label_components(v);
    const Oracle o = oracle_label(v);
    REQUIRE(static_cast<std::size_t>(lab.count) == o.wrap.size());
    std::map<std::size_t, int> to_label;
    std::map<int, std::size_t> to_root;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v.test(i)) {
            CHECK(lab.label[i] == -1);
            continue;
        }
        const int l = lab.label[i];
        const std::size_t r = o.root[i];
        if (!to_label.count(r)) to_label[r] = l;
        if (!to_root.count(l)) to_root[l] = r;
        CHECK(to_label[r] == l);
        CHECK(to_root[l] == r);
    }
    for (const auto& [r, axes] : o.wrap) CHECK(lab.wrap_axes[static_cast<std::size_t>(to_label[r])] == axes);
}

// Complement of a ball of radius a about the centre of the torus.
VoxelSet ball_hole(int d, int n, double a) {
    const GridSpec g = GridSpec::centred(d, n);
    return ShapeSpec::ball(Vec::Constant(d, 0.5), a).rasterize(g, Vec::Zero(d)).complement();
}

}  // namespace

TEST_CASE("labelling agrees with a union-find oracle near the percolation threshold") {
    int fixtures = 0;
    for (std::uint64_t s = 1; s <= 60; ++s) {
        for (double p : {0.55, 0.6, 0.65}) check_against_oracle(random_set(2, 4 + static_cast<int>(s % 13), p, s));
        fixtures += 3;
    }
    for (std::uint64_t s = 1; s <= 40; ++s) {
        for (double p : {0.28, 0.32, 0.4}) check_against_oracle(random_set(3, 3 + static_cast<int>(s % 10), p, 100 + s));
        fixtures += 3;
    }
    CHECK(fixtures >= 100);
}

TEST_CASE("wrap detection on hand-built sets") {
    SUBCASE("everything vacant wraps along every axis") {
        for (int d : {2, 3, 4}) {
            VoxelSet v(GridSpec::centred(d, 4), true);
            const Labeling lab = label_components(v);
            CHECK(lab.count == 1);
            CHECK(lab.wrap_axes[0] == (1u << d) - 1);
        }
    }
    SUBCASE("a slab of sausage leaves a complement wrapping the other axes") {
        const int d = 3, n = 8;
        VoxelSet sausage(GridSpec::centred(d, n));
        for (std::size_t i = 0; i < sausage.size(); ++i)
            if (sausage.coords(i)[0] == 3) sausage.set(i);
        const Labeling lab = label_components(sausage.complement());
        CHECK(lab.count == 1);
        CHECK(lab.wrap_axes[0] == 0b110);
    }
    SUBCASE("a straight line of cells wraps along its own axis only") {
        VoxelSet v(GridSpec::centred(2, 6));
        for (int x = 0; x < 6; ++x) {
            IVec c(2);
            c << x, 2;
            v.set(v.index(c));
        }
        const Labeling lab = label_components(v);
        CHECK(lab.count == 1);
        CHECK(lab.wrap_axes[0] == 0b01);
    }
    SUBCASE("a diagonal staircase wraps along both axes") {
        VoxelSet v(GridSpec::centred(2, 5));
        for (int x = 0; x < 5; ++x) {
            IVec c(2);
            c << x, x;
            v.set(v.index(c));
            c << x, (x + 1) % 5;
            v.set(v.index(c));
        }
        const Labeling lab = label_components(v);
        CHECK(lab.count == 1);
        CHECK(lab.wrap_axes[0] == 0b11);
    }
    SUBCASE("an isolated block does not wrap, even across the seam") {
        VoxelSet v(GridSpec::centred(3, 6));
        for (int x : {5, 0})
            for (int y : {5, 0}) {
                IVec c(3);
                c << x, y, 2;
                v.set(v.index(c));
            }
        const Labeling lab = label_components(v);
        CHECK(lab.count == 1);
        CHECK_FALSE(lab.wraps(0));
        const VoxelCloud cloud = component_cloud(lab, v, 0);
        IVec lo = cloud.cells.front(), hi = cloud.cells.front();
        for (const auto& c : cloud.cells) {
            lo = lo.cwiseMin(c);
            hi = hi.cwiseMax(c);
        }
        CHECK((hi - lo).maxCoeff() == 1);
    }
}

TEST_CASE("census edge cases") {
    SUBCASE("empty sausage") {
        const CensusReport r = measure(VoxelSet(GridSpec::centred(3, 6)));
        REQUIRE(r.components.size() == 1);
        CHECK(r.components[0].wrap_axes == 0b111);
        CHECK(r.any_wrap);
        CHECK(std::isinf(r.components[0].inradius));
        CHECK(chi_counts(r, 0.0, 0.0, 1.0) == 0);
    }
    SUBCASE("full sausage") {
        const CensusReport r = measure(VoxelSet(GridSpec::centred(3, 6), true));
        CHECK(r.components.empty());
        CHECK_THROWS_AS(max_volume(r), NoComponents);
        CHECK_THROWS_AS(max_diameter(r), NoComponents);
        CHECK_FALSE(kappa_star(r).has_value());
    }
    SUBCASE("capacity of a wrapping component is refused") {
        VoxelSet v(GridSpec::centred(3, 4), true);
        const Labeling lab = label_components(v);
        CHECK_THROWS_AS(component_cloud(lab, v, 0), CapacityError);
    }
}

TEST_CASE("measurements on a single ball-shaped hole") {
    const int d = 3, n = 32;
    const double a = 0.2, h = 1.0 / n;
    CensusOptions opt;
    opt.capacity = CensusOptions::Capacity::All;
    opt.eigen_count = 1;
    opt.seed = 7;
    const CensusReport r = measure(ball_hole(d, n, a), opt);
    REQUIRE(r.components.size() == 1);
    const ComponentRecord& c = r.components[0];
    CHECK_FALSE(c.wraps);
    CHECK_FALSE(r.kappa_star_censored);

    const double vol = unit_ball_volume(Dim(d)) * a * a * a;
    CHECK(c.volume == doctest::Approx(vol).epsilon(0.05));
    CHECK(c.diameter <= 2 * a + 1e-12);
    CHECK(c.diameter >= 2 * a - 2 * h);
    CHECK(c.inradius == doctest::Approx(a).epsilon(2 * h / a));

    REQUIRE(r.kappa_star.has_value());
    CHECK(*r.kappa_star == doctest::Approx(kappa_d(Dim(d)) * a).epsilon(0.05));
    REQUIRE(min_eigenvalue(r).has_value());
    // the voxel ball sits between the balls of radius a - h and a + h
    CHECK(*min_eigenvalue(r) >= lambda_d(Dim(d)) / ((a + h) * (a + h)));
    CHECK(*min_eigenvalue(r) <= lambda_d(Dim(d)) / ((a - h) * (a - h)));

    // Capacity between the equal-volume ball and the circumscribed ball;
    // eigenvalue at most the one of the inscribed ball.
    const double kd = kappa_d(Dim(d));
    const double r_vol = std::cbrt(c.volume / unit_ball_volume(Dim(d)));
    CHECK(*r.kappa_star >= kd * r_vol * 0.97);
    CHECK(*r.kappa_star <= kd * (c.diameter / 2 + h) * 1.03);
    CHECK(*min_eigenvalue(r) <= lambda_d(Dim(d)) / (c.inradius - h) / (c.inradius - h));
    const IsoperimetricCheck iso = isoperimetric_check(c, d, h);
    CHECK(iso.capacity_ok);
    CHECK(iso.eigen_ok);
    // equality for the ball, up to the raster
    CHECK(iso.cap_ratio == doctest::Approx(iso.vol_ratio).epsilon(0.08));
    CHECK(iso.eig_ratio == doctest::Approx(iso.vol_ratio).epsilon(0.08));
    CHECK(max_volume(r) == c.volume);
    CHECK(max_diameter(r) == c.diameter);
}

TEST_CASE("raster shells and the isoperimetric chain on random fixtures") {
    VoxelSet sausage(GridSpec::centred(3, 6), true);
    IVec p(3);
    p << 0, 3, 5;
    sausage.set(sausage.index(p), false);
    CHECK(measure(sausage).components[0].boundary_voxels == 1);
    CHECK(measure(sausage).components[0].shell_voxels == 6);

    for (std::uint64_t s = 1; s <= 4; ++s) {
        CensusOptions opt;
        opt.capacity = CensusOptions::Capacity::All;
        opt.walkers = 1500;
        opt.eigen_count = 1000;
        opt.seed = s;
        const CensusReport r = measure(random_set(3, 12, 0.75, 50 + s), opt);
        for (const auto& c : r.components) {
            if (c.wraps) continue;
            CHECK(c.boundary_voxels <= c.voxels);
            const IsoperimetricCheck iso = isoperimetric_check(c, 3, 1.0 / 12);
            CHECK(iso.vol_lo <= iso.vol_ratio);
            CHECK(iso.vol_ratio <= iso.vol_hi);
            CHECK(iso.capacity_ok);
            CHECK(iso.eigen_ok);
        }
    }
}

TEST_CASE("kappa star ignores ball bounds of small components") {
    const int d = 3, n = 24;
    VoxelSet sausage = ball_hole(d, n, 0.15);
    // a single-cell pocket far from the hole
    IVec p(3);
    p << 2, 2, 2;
    sausage.set(sausage.index(p), false);
    CensusOptions opt;
    opt.capacity = CensusOptions::Capacity::All;
    opt.volume_floor = 2;
    const CensusReport r = measure(sausage, opt);
    REQUIRE(r.components.size() == 2);
    int measured = 0;
    for (const auto& c : r.components) {
        REQUIRE(c.capacity.has_value());
        if (c.voxels == 1) {
            CHECK(c.capacity->method == CapMethod::BallBound);
        } else {
            ++measured;
            CHECK(*r.kappa_star == c.capacity->value);
        }
    }
    CHECK(measured == 1);
}

TEST_CASE("kappa star mode agrees with measuring everything") {
    const VoxelSet sausage = random_set(3, 14, 0.72, 31);
    CensusOptions all;
    all.capacity = CensusOptions::Capacity::All;
    all.walkers = 1500;
    all.seed = 5;
    CensusOptions star = all;
    star.capacity = CensusOptions::Capacity::KappaStar;
    const CensusReport ra = measure(sausage, all);
    const CensusReport rs = measure(sausage, star);
    REQUIRE(ra.kappa_star.has_value());
    REQUIRE(rs.kappa_star.has_value());
    CHECK(*rs.kappa_star == *ra.kappa_star);
}

TEST_CASE("chi counts are monotone") {
    const VoxelSet sausage = random_set(3, 14, 0.7, 11);
    CensusOptions opt;
    opt.capacity = CensusOptions::Capacity::All;
    opt.walkers = 1000;
    const CensusReport r = measure(sausage, opt);
    const double phi = 0.1;
    std::size_t prev = SIZE_MAX;
    for (double rho : {0.0, 0.02, 0.05, 0.08, 0.12}) {
        const std::size_t c = chi_counts(r, 0.0, rho, phi);
        CHECK(c <= prev);
        prev = c;
        std::size_t prev_k = c;
        for (double kappa : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            const std::size_t ck = chi_counts(r, kappa, rho, phi);
            CHECK(ck <= prev_k);
            prev_k = ck;
        }
    }
    std::size_t non_wrapping = 0;
    for (const auto& c : r.components) non_wrapping += c.wraps ? 0 : 1;
    CHECK(chi_counts(r, 0.0, 0.0, phi) == non_wrapping);
}

TEST_CASE("disjoint translates") {
    const int d = 3, n = 12;
    const GridSpec g = GridSpec::centred(d, n);
    const VoxelSet all(g, true);
    const ShapeSpec dot = ShapeSpec::ball(Vec::Zero(d), 1e-9);
    CHECK(disjoint_translates(all, dot, 1.0) == all.size());
    CHECK(disjoint_translates(VoxelSet(g), dot, 1.0) == 0);

    // a box covering exactly 2 x 2 x 2 cells tiles the full grid
    const double h = 1.0 / n;
    const ShapeSpec cube = ShapeSpec::box(Vec::Zero(d), Vec::Constant(d, h));
    CHECK(disjoint_translates(all, cube, 1.0) == all.size() / 8);

    CHECK(disjoint_translates(all, ShapeSpec::ball(Vec::Zero(d), 0.6), 1.0) == 0);
    CHECK_THROWS_AS(disjoint_translates(all, ShapeSpec(d), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(disjoint_translates(all, dot, 0.0), std::invalid_argument);

    for (std::uint64_t s = 1; s <= 10; ++s) {
        const VoxelSet v = random_set(d, n, 0.85, s);
        const ShapeSpec ball = ShapeSpec::ball(Vec::Zero(d), 1.2 * h);
        const std::size_t k = disjoint_translates(v, ball, 1.0);
        // the 1.2h ball claims the 33 cells with |k|^2 <= 4
        CHECK(k * 33 <= v.count());
        CHECK(disjoint_translates(v, dot, 1.0) == v.count());
    }
    // a hole that fits the shape admits at least one translate
    const VoxelSet hole = ball_hole(d, n, 0.3).complement();
    CHECK(disjoint_translates(hole, ShapeSpec::ball(Vec::Zero(d), 0.15), 1.0) >= 1);
}
