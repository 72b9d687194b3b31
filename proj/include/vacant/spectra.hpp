#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vacant/ldpmath.hpp"

namespace vacant {

/// First positive zero of the Bessel function J_nu (nu >= 0).
double bessel_zero(double nu);

/// Principal Dirichlet eigenvalue of -Delta/2 on the unit ball of R^d:
/// j_{d/2-1,1}^2 / 2.
double lambda_d(Dim d);

struct EigenOptions {
    double tol = 1e-7;  // relative residual |Ax - lambda x| / (lambda |x|)
    int max_iter = 200;
    /// Also solve on the eroded and dilated masks to bracket the raster error.
    bool shell_bracket = false;
};

struct EigenResult {
    double lambda = 0.0;
    double residual = 0.0;  // relative, as in EigenOptions::tol
    double h = 0.0;         // cell side
    int grid_n = 0;         // cells per unit length, round(1/h)
    int iterations = 0;
    int cg_iterations = 0;
    /// Single-cell components: the continuum eigenvalue of one cube is reported.
    bool single_cell = false;
    /// Eigenvalues of the dilated and eroded masks when requested (lo <= lambda <= hi).
    double shell_lo = 0.0;
    double shell_hi = 0.0;
};

class EigenError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Smallest eigenvalue of -1/2 times the (2d+1)-point finite-difference
/// Laplacian on the cells of `mask` (box grid, axis 0 fastest, side h), with
/// zero values on every cell outside the mask. Shifted inverse iteration with
/// conjugate-gradient inner solves, seeded by the interior distance transform.
EigenResult dirichlet_eigenvalue(std::span<const std::uint8_t> mask, std::span<const int> dims,
                                 double h, const EigenOptions& opt = {});

/// Cells of a centred ball of the given radius on a box of side 2*radius + 2h.
struct BoxMask {
    std::vector<std::uint8_t> mask;
    std::vector<int> dims;
    double h = 0.0;
};
BoxMask ball_mask(int d, double radius, double h);
BoxMask cube_mask(int d, double side, double h);

/// Face-neighbour erosion and dilation inside the box (the box border counts
/// as exterior).
std::vector<std::uint8_t> erode(std::span<const std::uint8_t> mask, std::span<const int> dims);
std::vector<std::uint8_t> dilate(std::span<const std::uint8_t> mask, std::span<const int> dims);

}  // namespace vacant
