#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vacant/capacity.hpp"
#include "vacant/ldpmath.hpp"

using namespace vacant;
using std::numbers::pi;

namespace {

Vec unit(int d, int axis) {
    Vec e = Vec::Zero(d);
    e[axis] = 1.0;
    return e;
}

bool within(const CapacityEstimate& e, double target, double sigmas = 3.0) {
    return std::abs(e.value - target) <= sigmas * e.std_error + 1e-12;
}

}  // namespace

TEST_CASE("ball capacity") {
    CHECK(cap_ball(1.0, Dim(3)).value == doctest::Approx(2 * pi));
    CHECK(cap_ball(0.0, Dim(3)).value == 0.0);
    CHECK(cap_ball(2.0, Dim(4)).value == doctest::Approx(8 * pi * pi));
    CHECK(cap_ball(1.0, Dim(3)).std_error == 0.0);
    CHECK(cap_ball(1.0, Dim(3)).method == CapMethod::Analytic);
    CHECK_THROWS(cap_ball(-1.0, Dim(3)));
}

TEST_CASE("sphere samplers") {
    for (int d = 3; d <= 5; ++d) {
        CounterRng rng(d, Stream::Sampling);
        const int n = 40000;
        Vec mean = Vec::Zero(d);
        for (int i = 0; i < n; ++i) {
            const Vec u = uniform_on_sphere(d, rng);
            REQUIRE(u.norm() == doctest::Approx(1.0));
            mean += u;
        }
        CHECK((mean / n).norm() < 0.02);
    }
}

// Harmonic h: the harmonic measure from z averages h to h(z).
TEST_CASE("interior Poisson kernel reproduces harmonic functions") {
    for (int d = 3; d <= 5; ++d) {
        CounterRng rng(10 + d, Stream::Sampling);
        const Vec c = Vec::Constant(d, 0.3);
        const double r0 = 2.0;
        Vec z = c;
        z[0] += 1.5;
        z[1] -= 0.4;
        const int n = 100000;
        double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
        for (int i = 0; i < n; ++i) {
            const Vec y = sample_poisson_kernel(z, c, r0, rng) - c;
            REQUIRE(y.norm() == doctest::Approx(r0));
            const double h1 = y[0];
            const double h2 = y[0] * y[0] - y[1] * y[1];
            s1 += h1;
            q1 += h1 * h1;
            s2 += h2;
            q2 += h2 * h2;
        }
        const Vec w = z - c;
        const double m1 = s1 / n, m2 = s2 / n;
        const double e1 = std::sqrt((q1 / n - m1 * m1) / n), e2 = std::sqrt((q2 / n - m2 * m2) / n);
        CAPTURE(d);
        CHECK(std::abs(m1 - w[0]) < 4 * e1);
        CHECK(std::abs(m2 - (w[0] * w[0] - w[1] * w[1])) < 4 * e2);
    }
}

// The dipole y_1 / |y|^d is harmonic outside the sphere and vanishes at
// infinity; conditioning on a hit gives E[Y_1] = r0^2 / s from x = s e_1.
TEST_CASE("exterior return law") {
    for (int d = 3; d <= 5; ++d) {
        CounterRng rng(20 + d, Stream::Sampling);
        const double r0 = 1.0;
        for (double s : {1.5, 4.0}) {
            const Vec x = s * unit(d, 0);
            const int n = 100000;
            double m = 0, q = 0;
            for (int i = 0; i < n; ++i) {
                const Vec y = sample_exterior_return(x, Vec::Zero(d), r0, rng);
                REQUIRE(y.norm() == doctest::Approx(r0));
                m += y[0];
                q += y[0] * y[0];
            }
            m /= n;
            const double err = std::sqrt((q / n - m * m) / n);
            CAPTURE(d);
            CAPTURE(s);
            CHECK(std::abs(m - r0 * r0 / s) < 4 * err);
        }
    }
}

TEST_CASE("walk on spheres: balls") {
    WosParams p;
    p.walkers = 20000;
    for (int d = 3; d <= 5; ++d) {
        const auto e = cap_wos(ShapeSpec::ball(Vec::Zero(d), 1.0), p, 1);
        CAPTURE(d);
        CHECK(e.method == CapMethod::Wos);
        CHECK(e.samples == p.walkers);
        CHECK(within(e, kappa_d(Dim(d))));
    }
    WosParams q = p;
    q.enclose_radius = 3.0;
    const auto far = cap_wos(ShapeSpec::ball(unit(3, 1), 0.5), q, 2);
    CHECK(within(far, pi));
    WosParams bad = p;
    bad.enclose_radius = 0.5;
    CHECK_THROWS(cap_wos(ShapeSpec::ball(Vec::Zero(3), 1.0), bad, 1));
    CHECK(cap_wos(ShapeSpec(3), p, 1).value == 0.0);
}

TEST_CASE("walk on spheres: structural properties") {
    WosParams p;
    p.walkers = 20000;
    const ShapeSpec cube = ShapeSpec::box(Vec::Constant(3, -0.5), Vec::Constant(3, 0.5));
    const auto base = cap_wos(cube, p, 3);
    for (double phi : {0.6, 1.7}) {
        const auto scaled = cap_wos(cube.scaled(phi), p, 4);
        const double ratio = scaled.value / (phi * base.value);
        const double err = ratio * std::hypot(scaled.std_error / scaled.value, base.std_error / base.value);
        CHECK(std::abs(ratio - 1) < 3 * err);
    }
    // monotone: inscribed ball <= cube <= circumscribed ball
    CHECK(base.value >= kappa_d(Dim(3)) * 0.5 - 3 * base.std_error);
    CHECK(base.value <= kappa_d(Dim(3)) * std::sqrt(3.0) / 2 + 3 * base.std_error);
    // union bound: boxes, so that the intersection is again a box
    const Vec lo = Vec::Constant(3, -0.5), hi = Vec::Constant(3, 0.5);
    for (double shift : {0.3, 0.7}) {
        const ShapeSpec E = ShapeSpec::box(lo, hi);
        const ShapeSpec F = ShapeSpec::box(lo + shift * unit(3, 0) + 0.2 * unit(3, 1), hi + shift * unit(3, 0) + 0.2 * unit(3, 1));
        Vec ilo = lo, ihi = hi;
        ilo[0] += shift;
        ilo[1] += 0.2;
        const auto cu = cap_wos(E.united(F), p, 10);
        const auto ci = cap_wos(ShapeSpec::box(ilo, ihi), p, 11);
        const auto ce = cap_wos(E, p, 12);
        const auto cf = cap_wos(F, p, 13);
        const double sigma = std::sqrt(cu.std_error * cu.std_error + ci.std_error * ci.std_error +
                                       ce.std_error * ce.std_error + cf.std_error * cf.std_error);
        CHECK(cu.value + ci.value <= ce.value + cf.value + 3 * sigma);
    }
}

TEST_CASE("hitting probabilities decay like the capacity") {
    WosParams p;
    p.walkers = 20000;
    const auto rows = hitting_decay_check(ShapeSpec::ball(Vec::Zero(3), 1.0), {1.5, 3.0, 8.0}, p, 6);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(std::abs(r.p - 1 / r.s) < 3 * r.std_error + 1e-12);
        CHECK(r.scaled == doctest::Approx(r.s * r.p));
    }
    const auto tube = hitting_decay_check(ShapeSpec::segment(-unit(3, 0), unit(3, 0), 1e-6), {4.0, 16.0}, p, 7);
    CHECK(tube.back().scaled < 0.2);
}

TEST_CASE("thin tubes have vanishing capacity") {
    WosParams p;
    p.walkers = 8000;
    double prev = 1e9;
    for (double delta : {1e-1, 1e-2, 1e-4, 1e-8}) {
        const auto e = cap_wos(ShapeSpec::segment(Vec::Zero(3), unit(3, 0), delta), p, 8);
        CHECK(e.value < prev + 3 * e.std_error);
        prev = e.value;
    }
    CHECK(prev < 0.25 * kappa_d(Dim(3)));
}

TEST_CASE("energy method on sphere fixtures") {
    CHECK(cap_energy(fibonacci_sphere(2000, 1.0, Vec::Zero(3))).value ==
          doctest::Approx(2 * pi).epsilon(1e-6));
    CHECK(cap_energy(cubed_sphere(4, 6, 1.0, Vec::Zero(4))).value ==
          doctest::Approx(kappa_d(Dim(4))).epsilon(1e-6));
    const double r1 = cap_energy(fibonacci_sphere(800, 1.0, Vec::Zero(3))).value;
    const double r2 = cap_energy(fibonacci_sphere(800, 2.0, unit(3, 2))).value;
    CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(1e-10));
    // Same constant on a different discretization of the same sphere.
    CHECK(cap_energy(cubed_sphere(3, 12, 1.0, Vec::Zero(3))).value == doctest::Approx(2 * pi).epsilon(0.002));
}

TEST_CASE("energy method edge cases") {
    SurfaceCloud one;
    one.d = 3;
    one.points.push_back(Vec::Zero(3));
    one.areas.push_back(0.0);
    CHECK(cap_energy(one).value == 0.0);
    SurfaceCloud dup = fibonacci_sphere(10, 1.0, Vec::Zero(3));
    dup.points.push_back(dup.points.front());
    dup.areas.push_back(dup.areas.front());
    CHECK_THROWS_AS(cap_energy(dup), CapacityError);
    CHECK_THROWS(c_panel(Dim(7)));
    const auto refined = cap_energy_refined([](std::size_t n) { return fibonacci_sphere(n, 1.0, Vec::Zero(3)); }, 600);
    CHECK(refined.std_error > 0.0);
    CHECK(refined.std_error < 0.05);
}

TEST_CASE("voxel oracle is a lower bound, exact near the set") {
    VoxelCloud cloud;
    cloud.d = 3;
    cloud.h = 0.1;
    CounterRng rng(31, Stream::Fixture);
    for (int i = 0; i < 40; ++i) {
        IVec c(3);
        for (int k = 0; k < 3; ++k) c[k] = int(rng.uniform() * 6);
        cloud.cells.push_back(c);
    }
    const double exact = 0.25;
    const DistanceOracle f = voxel_oracle(cloud, exact);
    for (int i = 0; i < 3000; ++i) {
        Vec x(3);
        for (int k = 0; k < 3; ++k) x[k] = -0.8 + 2.2 * rng.uniform();
        double best = 1e9;
        for (const auto& c : cloud.cells) best = std::min(best, (x - c.cast<double>() * cloud.h).norm());
        const double v = f(x);
        REQUIRE(v <= best + 1e-12);
        if (best <= exact) REQUIRE(v == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("voxel ball capacity") {
    VoxelCloud ball;
    ball.d = 3;
    ball.h = 1.0 / 128;
    const int m = 14;
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j)
            for (int k = -m; k <= m; ++k)
                if (std::sqrt(double(i * i + j * j + k * k)) * ball.h <= 0.1)
                    ball.cells.push_back((IVec(3) << i, j, k).finished());
    WosParams p;
    p.walkers = 20000;
    const auto e = cap_voxelset(ball, p, 9);
    CHECK(e.value == doctest::Approx(kappa_d(Dim(3)) * 0.1).epsilon(0.05));
    VoxelCloud empty;
    empty.h = 0.1;
    CHECK(cap_voxelset(empty, p, 9).value == 0.0);
}
