#pragma once

// Newtonian capacity: closed form for balls, walk-on-spheres hitting
// estimates, and a discrete equilibrium-energy minimizer.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vacant/ldpmath.hpp"
#include "vacant/rng.hpp"
#include "vacant/shape.hpp"

namespace vacant {

enum class CapMethod { Analytic, Wos, Energy, BallBound };
std::string to_string(CapMethod m);

struct CapacityEstimate {
    double value = 0.0;
    double std_error = 0.0;
    CapMethod method = CapMethod::Analytic;
    std::size_t samples = 0;
    std::size_t censored = 0;
};

class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct WosParams {
    /// Radius of the launch sphere about the shape's bounding centre; 0 picks
    /// the bounding radius.
    double enclose_radius = 0.0;
    std::size_t walkers = 100000;
    /// Absorption distance; 0 picks 1e-4 times the shape's diameter bound.
    double epsilon_shell = 0.0;
    std::size_t max_steps = 100000;
    int threads = 1;
};

/// Lower bound on the distance to a set, exact within a few absorption
/// shells of it.
using DistanceOracle = std::function<double(const Vec&)>;

CapacityEstimate cap_ball(double radius, Dim d);

/// Walk-on-spheres estimate of Cap E = kappa_d r0^{d-2} P(hit E), starting
/// uniformly on the sphere of radius r0 about `centre`, which must enclose E.
/// Walkers leaving that sphere escape with probability 1 - (r0/s)^{d-2};
/// otherwise they re-enter at a point drawn from the exact exterior hitting
/// law. Throws CapacityError if more than 1% of walkers are censored.
CapacityEstimate cap_wos(const DistanceOracle& dist, Dim d, const Vec& centre, double r0,
                         double epsilon_shell, const WosParams& params, std::uint64_t seed);
CapacityEstimate cap_wos(const ShapeSpec& shape, const WosParams& params, std::uint64_t seed);

/// Draws the point where Brownian motion from x (|x - c| > r0) first hits the
/// sphere S(c, r0), conditioned on hitting it.
Vec sample_exterior_return(const Vec& x, const Vec& c, double r0, CounterRng& rng);
/// Draws from the harmonic measure of the ball B(c, r0) seen from z inside it.
Vec sample_poisson_kernel(const Vec& z, const Vec& c, double r0, CounterRng& rng);
Vec uniform_on_sphere(int d, CounterRng& rng);

/// Point cloud on the boundary of a set, with the surface area of each
/// point's panel.
struct SurfaceCloud {
    int d = 3;
    std::vector<Vec> points;
    std::vector<double> areas;

    SurfaceCloud& append(const SurfaceCloud& other);
};

SurfaceCloud fibonacci_sphere(std::size_t n, double radius, const Vec& centre);
/// Cube-face grid (m^{d-1} panels per face) projected radially onto the
/// sphere; each panel area carries the projection Jacobian 1/|p|^d.
SurfaceCloud cubed_sphere(int d, int m, double radius, const Vec& centre);
/// Face-centre grid on the surface of a cube in R^3, m x m panels per face.
SurfaceCloud cube_surface(int m, double side, const Vec& centre);

/// Panel self-energy constant used by cap_energy, per dimension.
double c_panel(Dim d);

/// Minimizes w^T G w over probability vectors w >= 0, with G the Green matrix
/// and diagonal c_panel / (kappa_d h_i^{d-2}), h_i = area_i^{1/(d-1)}.
/// Returns 1/E_min. Rejects coincident points.
CapacityEstimate cap_energy(const SurfaceCloud& cloud, double c = 0.0);
/// As cap_energy at resolution n, with std_error = |C(n) - C(n/2)|.
CapacityEstimate cap_energy_refined(const std::function<SurfaceCloud(std::size_t)>& cloud_at, std::size_t n,
                                    double c = 0.0);

/// Cells of one non-wrapping component lifted to Z^d, side h.
struct VoxelCloud {
    int d = 3;
    double h = 0.0;
    std::vector<IVec> cells;
};

/// Distance oracle for the cell centres of a VoxelCloud: exact within
/// `exact_within` of the cloud, a lower bound further out.
DistanceOracle voxel_oracle(const VoxelCloud& cloud, double exact_within);

/// WoS capacity of a voxel component, absorbed within half a cell diagonal of
/// a cell centre. Empty component: capacity 0.
CapacityEstimate cap_voxelset(const VoxelCloud& cloud, const WosParams& params, std::uint64_t seed);

struct HittingRow {
    double s = 0.0;
    double p = 0.0;
    double std_error = 0.0;
    double scaled = 0.0;  // s^{d-2} p
    double scaled_error = 0.0;
};

/// P_x(hit E) for x at distance s from E's bounding centre along e_1.
std::vector<HittingRow> hitting_decay_check(const ShapeSpec& shape, const std::vector<double>& distances,
                                            const WosParams& params, std::uint64_t seed);

}  // namespace vacant
