#include "vacant/ldpmath.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vacant/spectra.hpp"

namespace vacant {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

Dim::Dim(int d) : d_(d) {
    if (d < 3) throw std::invalid_argument("dimension must be >= 3, got " + std::to_string(d));
}

double lanczos_gamma(double x) {
    if (x < 0.5) return kPi / (std::sin(kPi * x) * lanczos_gamma(1.0 - x));
    x -= 1.0;
    double a = kLanczos[0];
    const double t = x + 7.5;
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
    return std::sqrt(2.0 * kPi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double kappa_d(Dim d) {
    const double h = 0.5 * d;
    return 2.0 * std::pow(kPi, h) / lanczos_gamma(h - 1.0);
}

double unit_ball_volume(Dim d) {
    const double h = 0.5 * d;
    return std::pow(kPi, h) / lanczos_gamma(h + 1.0);
}

double phi_d(double t, Dim d) {
    if (!(t > 1.0)) throw std::domain_error("phi_d requires t > 1");
    const double k = static_cast<double>(d) / ((d - 2.0) * kappa_d(d));
    return std::pow(k * std::log(t) / t, 1.0 / (d - 2.0));
}

double phi_local(double t, Dim d) {
    if (!(t > 0.0)) throw std::domain_error("phi_local requires t > 0");
    return std::pow(t, -1.0 / (d - 2.0));
}

double psi_d(double eps, Dim d) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("psi_d requires 0 < eps < 1");
    return std::pow(eps, -(d - 2.0)) * std::log(1.0 / eps) / kappa_d(d);
}

double J_d(double kappa, Dim d) {
    if (!(kappa >= 0.0)) throw std::domain_error("J_d requires kappa >= 0");
    return static_cast<double>(d) / (d - 2.0) * (1.0 - kappa / kappa_d(d));
}

ExtendedReal I_d(ExtendedReal kappa, Dim d) {
    if (kappa.is_infinite()) return ExtendedReal::infinity();
    const double k = kappa.value();
    if (!(k >= 0.0)) throw std::domain_error("I_d requires kappa >= 0");
    if (k < kappa_d(d)) return ExtendedReal::infinity();
    return ExtendedReal::finite(-J_d(k, d));
}

ExtendedReal I_d(double kappa, Dim d) { return I_d(ExtendedReal::finite(kappa), d); }

ExtendedReal rate_volume(double v, Dim d) {
    if (!(v > 0.0)) throw std::domain_error("rate_volume requires v > 0");
    return I_d(kappa_d(d) * std::pow(v / unit_ball_volume(d), (d - 2.0) / d), d);
}

ExtendedReal rate_dirichlet(double lambda, Dim d) {
    if (!(lambda > 0.0)) throw std::domain_error("rate_dirichlet requires lambda > 0");
    return I_d(kappa_d(d) * std::pow(lambda_d(d) / lambda, (d - 2.0) / 2.0), d);
}

ExtendedReal rate_inradius(double r, Dim d) {
    if (!(r > 0.0)) throw std::domain_error("rate_inradius requires r > 0");
    return I_d(kappa_d(d) * std::pow(r, d - 2.0), d);
}

ExtendedReal rate_cover(double u, Dim d) {
    if (!(u > 0.0)) throw std::domain_error("rate_cover requires u > 0");
    if (u < static_cast<double>(d)) return ExtendedReal::infinity();
    return ExtendedReal::finite(u - d);
}

double green_at(double r, Dim d) {
    if (!(r > 0.0)) throw std::domain_error("green: singular at zero separation");
    return 1.0 / (kappa_d(d) * std::pow(r, d - 2.0));
}

double green(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Dim d) {
    if (x.size() != d || y.size() != d) throw std::invalid_argument("green: dimension mismatch");
    return green_at((x - y).norm(), d);
}

double expected_excursions(double t, double r, double R, Dim d) {
    if (!(r > 0.0 && r < R)) throw std::domain_error("expected_excursions requires 0 < r < R");
    if (!(t >= 0.0)) throw std::domain_error("expected_excursions requires t >= 0");
    return kappa_d(d) * t / (std::pow(r, -(d - 2.0)) - std::pow(R, -(d - 2.0)));
}

double default_rho(double t, Dim d) {
    return phi_d(t, d) / std::pow(std::log(t), 1.0 / (2.0 * d));
}

}  // namespace vacant
