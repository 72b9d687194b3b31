#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vacant/ldpmath.hpp"
#include "vacant/spectra.hpp"

using namespace vacant;
using std::numbers::pi;

TEST_CASE("dimension guard") {
    CHECK_THROWS_AS(Dim(2), std::invalid_argument);
    CHECK(Dim(3).value() == 3);
}

TEST_CASE("gamma at half integers") {
    CHECK(lanczos_gamma(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-14));
    CHECK(lanczos_gamma(1.5) == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-14));
    CHECK(lanczos_gamma(2.5) == doctest::Approx(0.75 * std::sqrt(pi)).epsilon(1e-14));
    for (int k = 1; k < 12; ++k) CHECK(lanczos_gamma(k) == doctest::Approx(std::tgamma(k)).epsilon(1e-13));
}

TEST_CASE("kappa_d") {
    CHECK(std::abs(kappa_d(Dim(3)) - 2 * pi) < 1e-10);
    CHECK(std::abs(kappa_d(Dim(4)) - 2 * pi * pi) < 1e-10);
    CHECK(std::abs(kappa_d(Dim(5)) - 4 * pi * pi) < 1e-10);
    for (int d = 3; d <= 8; ++d) {
        const double ref = 2 * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0 - 1);
        CHECK(kappa_d(Dim(d)) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("unit ball volume") {
    CHECK(unit_ball_volume(Dim(3)) == doctest::Approx(4 * pi / 3).epsilon(1e-13));
    CHECK(unit_ball_volume(Dim(4)) == doctest::Approx(pi * pi / 2).epsilon(1e-13));
}

TEST_CASE("phi_d") {
    CHECK(phi_d(std::exp(1.0), Dim(3)) == doctest::Approx(3 / (2 * pi * std::exp(1.0))).epsilon(1e-12));
    CHECK(phi_d(std::exp(1.0), Dim(3)) == doctest::Approx(0.1756490).epsilon(1e-6));
    CHECK(phi_d(std::exp(2.0), Dim(4)) == doctest::Approx(std::sqrt(2.0) / (pi * std::exp(1.0))).epsilon(1e-12));
    CHECK(phi_d(std::exp(2.0), Dim(4)) == doctest::Approx(0.1656040).epsilon(1e-6));
    CHECK_THROWS(phi_d(1.0, Dim(3)));
    CHECK_THROWS(phi_d(0.5, Dim(3)));
    double prev = phi_d(3.0, Dim(3));
    for (double t = 4; t < 1e9; t *= 1.7) {
        const double v = phi_d(t, Dim(3));
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("psi_d") {
    const double e = std::exp(1.0);
    CHECK(psi_d(1 / e, Dim(3)) == doctest::Approx(e / (2 * pi)).epsilon(1e-12));
    CHECK(psi_d(1 / e, Dim(3)) == doctest::Approx(0.4326280).epsilon(1e-6));
    CHECK(psi_d(1 / e, Dim(4)) == doctest::Approx(e * e / (2 * pi * pi)).epsilon(1e-12));
    CHECK(psi_d(1 / e, Dim(4)) == doctest::Approx(0.3743340).epsilon(1e-6));
    CHECK(psi_d(1 - 1e-12, Dim(3)) < 1e-11);
    CHECK_THROWS(psi_d(0.0, Dim(3)));
    CHECK_THROWS(psi_d(1.0, Dim(3)));
}

TEST_CASE("J_d and I_d") {
    for (int d = 3; d <= 6; ++d) {
        const Dim D(d);
        const double kd = kappa_d(D);
        CHECK(J_d(kd, D) == 0.0);
        CHECK(I_d(kd, D).value() == 0.0);
        CHECK(J_d(0.0, D) == doctest::Approx(d / (d - 2.0)));
        // affine, decreasing
        const double a = J_d(0.3 * kd, D), b = J_d(1.1 * kd, D), c = J_d(1.9 * kd, D);
        CHECK(a > b);
        CHECK(b > c);
        CHECK((a - b) / 0.8 == doctest::Approx((b - c) / 0.8).epsilon(1e-12));
        for (double f : {1.0, 1.3, 2.0, 7.5}) CHECK(I_d(f * kd, D).value() == doctest::Approx(-J_d(f * kd, D)));
        CHECK(I_d(0.99 * kd, D).is_infinite());
        CHECK(I_d(0.0, D).is_infinite());
        CHECK(I_d(ExtendedReal::infinity(), D).is_infinite());
    }
    CHECK(J_d(0.0, Dim(3)) == 3.0);
    CHECK(J_d(2 * kappa_d(Dim(3)), Dim(3)) == doctest::Approx(-3.0));
    CHECK(I_d(2 * kappa_d(Dim(3)), Dim(3)).value() == doctest::Approx(3.0));
    CHECK_THROWS(J_d(-1.0, Dim(3)));
}

TEST_CASE("composed rate functions") {
    for (int d = 3; d <= 5; ++d) {
        const Dim D(d);
        CHECK(rate_volume(unit_ball_volume(D), D).value() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rate_dirichlet(lambda_d(D), D).value() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rate_inradius(1.0, D).value() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rate_cover(d, D).value() == 0.0);
        CHECK(rate_cover(d - 0.5, D).is_infinite());
        CHECK(rate_cover(d + 2.0, D).value() == doctest::Approx(2.0));
        for (double r : {0.5, 1.2, 3.0}) {
            const ExtendedReal a = rate_inradius(r, D);
            const ExtendedReal b = I_d(kappa_d(D) * std::pow(r, d - 2.0), D);
            CHECK(a.is_infinite() == b.is_infinite());
            if (a.is_finite()) CHECK(a.value() == doctest::Approx(b.value()));
        }
        CHECK(rate_volume(2.0 * unit_ball_volume(D), D).value() > 0);
        CHECK(rate_volume(0.5 * unit_ball_volume(D), D).is_infinite());
        CHECK(rate_dirichlet(0.5 * lambda_d(D), D).value() > 0);
        CHECK(rate_dirichlet(2.0 * lambda_d(D), D).is_infinite());
        CHECK_THROWS(rate_volume(0.0, D));
        CHECK_THROWS(rate_dirichlet(-1.0, D));
        CHECK_THROWS(rate_inradius(0.0, D));
        CHECK_THROWS(rate_cover(0.0, D));
    }
}

TEST_CASE("green function") {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3), y = Eigen::VectorXd::Zero(3);
    y[0] = 1.0;
    CHECK(green(x, y, Dim(3)) == doctest::Approx(1 / (2 * pi)));
    Eigen::VectorXd x4 = Eigen::VectorXd::Zero(4), y4 = Eigen::VectorXd::Zero(4);
    y4[3] = 1.0;
    CHECK(green(x4, y4, Dim(4)) == doctest::Approx(1 / (2 * pi * pi)));
    CHECK(green_at(1e6, Dim(3)) < 1e-6);
    CHECK_THROWS(green(x, x, Dim(3)));
}

TEST_CASE("expected excursions") {
    CHECK(expected_excursions(90.0, 0.01, 0.1, Dim(3)) == doctest::Approx(2 * pi));
    CHECK(expected_excursions(0.0, 0.01, 0.1, Dim(3)) == 0.0);
    CHECK(expected_excursions(1.0, 0.1 - 1e-9, 0.1, Dim(3)) > 1e6);
    CHECK_THROWS(expected_excursions(1.0, 0.1, 0.1, Dim(3)));
}

TEST_CASE("default rho sits inside the window") {
    for (double t : {20.0, 100.0, 1e4}) {
        const double phi = phi_d(t, Dim(3));
        const double rho = default_rho(t, Dim(3));
        CHECK(rho < phi);
        CHECK(rho > phi / std::pow(std::log(t), 1.0 / 3));
        CHECK(rho == doctest::Approx(phi / std::pow(std::log(t), 1.0 / 6)));
    }
}

// psi(r phi(t)) d r^{d-2} / t = 1 - (log log t + log A + (d-2) log r) / log t
// with A = d / ((d-2) kappa_d), so it tends to 1 only logarithmically.
TEST_CASE("phi-psi duality") {
    for (int d = 3; d <= 5; ++d) {
        const Dim D(d);
        const double A = d / ((d - 2.0) * kappa_d(D));
        for (double r : {0.5, 1.0, 2.0}) {
            auto ratio = [&](double t) { return psi_d(r * phi_d(t, D), D) * d * std::pow(r, d - 2.0) / t; };
            for (double t : {1e6, 1e12, 1e40}) {
                const double L = std::log(t);
                const double ref = 1 - (std::log(L) + std::log(A) + (d - 2) * std::log(r)) / L;
                CHECK(ratio(t) == doctest::Approx(ref).epsilon(1e-10));
            }
            CHECK(std::abs(ratio(1e300) - 1) < 0.02);
        }
    }
}

// With t = u psi(eps) and L = log(1/eps), phi(t) / ((d/u)^{1/(d-2)} eps) is
// exactly [log t / ((d-2) L)]^{1/(d-2)}, which tends to 1 logarithmically.
TEST_CASE("phi inverts psi asymptotically") {
    for (int d = 3; d <= 5; ++d) {
        const Dim D(d);
        const int m = d - 2;
        for (double u : {1.0, double(d), 2.0 * d}) {
            auto ratio = [&](double eps) {
                return phi_d(u * psi_d(eps, D), D) / (std::pow(d / u, 1.0 / m) * eps);
            };
            for (double eps : {1e-2, 1e-6, 1e-30}) {
                const double L = std::log(1 / eps);
                const double logt = std::log(u) + m * L + std::log(L) - std::log(kappa_d(D));
                CHECK(ratio(eps) == doctest::Approx(std::pow(logt / (m * L), 1.0 / m)).epsilon(1e-10));
            }
            CHECK(std::abs(ratio(1e-30) - 1) < 0.07);
        }
    }
}
