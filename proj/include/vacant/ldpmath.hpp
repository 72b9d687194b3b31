#pragma once

// Closed-form scaling functions, constants and rate functions for the vacant
// set of Brownian motion on the unit torus. Everything here is a pure function.

#include <Eigen/Dense>

#include "vacant/extended_real.hpp"

namespace vacant {

/// Spatial dimension, validated to be at least 3.
class Dim {
  public:
    explicit Dim(int d);
    constexpr int value() const { return d_; }
    constexpr operator int() const { return d_; }

  private:
    int d_;
};

/// Gamma function via a Lanczos approximation (g = 7, 9 terms), with
/// reflection for x < 1/2. Relative accuracy is about 1e-15 on half-integers.
double lanczos_gamma(double x);

/// Capacity of the unit ball, 2 pi^{d/2} / Gamma(d/2 - 1).
double kappa_d(Dim d);

/// Volume of the unit ball, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(Dim d);

/// Linear size of the largest vacant regions at time t > 1:
/// [(d / ((d-2) kappa_d)) log(t) / t]^{1/(d-2)}.
double phi_d(double t, Dim d);

/// Local (typical hole) scale t^{-1/(d-2)}.
double phi_local(double t, Dim d);

/// Cover-time scale eps^{-(d-2)} log(1/eps) / kappa_d for 0 < eps < 1.
double psi_d(double eps, Dim d);

/// Affine exponent (d/(d-2)) (1 - kappa/kappa_d), kappa >= 0.
double J_d(double kappa, Dim d);

/// Rate function: -J_d(kappa) for kappa >= kappa_d, +inf below and at +inf.
ExtendedReal I_d(ExtendedReal kappa, Dim d);
ExtendedReal I_d(double kappa, Dim d);

ExtendedReal rate_volume(double v, Dim d);
ExtendedReal rate_dirichlet(double lambda, Dim d);
ExtendedReal rate_inradius(double r, Dim d);
ExtendedReal rate_cover(double u, Dim d);

/// Green function of Brownian motion on R^d at separation r > 0:
/// 1 / (kappa_d r^{d-2}).
double green_at(double r, Dim d);

/// Green function between two points of R^d; throws at x == y.
double green(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Dim d);

/// Typical number of (r,R)-excursions by time t:
/// kappa_d t / (r^{-(d-2)} - R^{-(d-2)}). Requires 0 < r < R.
double expected_excursions(double t, double r, double R, Dim d);

/// Default sausage radius: phi_d(t) / (log t)^{1/(2d)}, the geometric
/// midpoint of the admissible window phi_d(t)/(log t)^{1/d} << rho << phi_d(t).
double default_rho(double t, Dim d);

}  // namespace vacant
