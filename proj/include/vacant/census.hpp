#pragma once

// Components of the vacant set on the torus grid, their geometry, and the
// extremal statistics built from them.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vacant/capacity.hpp"
#include "vacant/shape.hpp"
#include "vacant/spectra.hpp"
#include "vacant/torus.hpp"

namespace vacant {

/// Face-adjacency (2d neighbours) components of the occupied cells of
/// `vacant`. Every labelled cell carries an integer winding per axis: the
/// number of times the BFS tree path from the component root crosses the
/// periodic boundary. An edge whose endpoints disagree with the crossing
/// between them closes a cycle with nonzero displacement, i.e. the component
/// wraps along every axis where they disagree.
struct Labeling {
    int d = 3;
    int n = 2;
    int count = 0;
    std::vector<std::int32_t> label;     // -1 for cells outside the set
    std::vector<std::int16_t> winding;   // d entries per cell
    std::vector<std::uint8_t> wrap_axes; // per component, bit k = wraps along axis k

    bool wraps(int c) const { return wrap_axes[static_cast<std::size_t>(c)] != 0; }
    /// Cell coordinates lifted to Z^d (coords + n * winding).
    IVec lifted(std::size_t cell, const VoxelSet& grid) const;
};

Labeling label_components(const VoxelSet& vacant);
bool detect_wrap(const Labeling& lab, int component);

struct ComponentRecord {
    int id = 0;
    std::size_t voxels = 0;
    double volume = 0.0;
    std::size_t boundary_voxels = 0;  // cells with a face neighbour in the sausage
    std::size_t shell_voxels = 0;     // sausage cells face-adjacent to the component
    IVec bbox_lo, bbox_hi;  // lifted cell coordinates
    bool wraps = false;
    std::uint8_t wrap_axes = 0;
    double diameter = 0.0;  // farthest-point sweeps over lifted cell centres (a lower bound)
    double inradius = 0.0;  // max distance from a component cell centre to the sausage
    std::optional<CapacityEstimate> capacity;
    std::optional<EigenResult> eigen;
};

struct CensusOptions {
    enum class Capacity { None, All, KappaStar };
    Capacity capacity = Capacity::None;
    std::size_t walkers = 4000;
    std::size_t volume_floor = 10;  // below this, capacity = circumscribed-ball bound
    /// Eigenvalues for the `eigen_count` largest non-wrapping components.
    int eigen_count = 0;
    double eigen_tol = 1e-6;
    int threads = 1;
    std::uint64_t seed = 1;
};

struct CensusReport {
    int d = 3;
    int n = 2;
    std::vector<ComponentRecord> components;
    bool any_wrap = false;
    std::optional<double> kappa_star;
    bool kappa_star_censored = false;  // wrapping components were excluded
};

class NoComponents : public std::runtime_error {
  public:
    NoComponents() : std::runtime_error("census: no vacant components") {}
};

/// Census of the complement of `sausage`.
CensusReport measure(const VoxelSet& sausage, const CensusOptions& opt = {});

/// Cells of one component lifted to Z^d.
VoxelCloud component_cloud(const Labeling& lab, const VoxelSet& grid, int component);

/// Largest measured capacity over non-wrapping components (ball bounds of
/// components below the volume floor do not count).
std::optional<double> kappa_star(const CensusReport& r);

/// Non-wrapping components with inradius >= rho and capacity >=
/// kappa * phi^{d-2}. For kappa > 0 components without a capacity are not
/// counted, so the census should have been run with Capacity::All.
std::size_t chi_counts(const CensusReport& r, double kappa, double rho, double phi);

/// Both sides of Cap/kappa_d >= (Vol/V_d)^{(d-2)/d} >= (lambda_d/lambda)^{(d-2)/2}
/// for one component. The volume term is bracketed by one raster shell
/// (component minus its boundary cells, component plus its outer shell);
/// the capacity side gets 3 standard errors.
struct IsoperimetricCheck {
    double cap_ratio = 0.0;
    double cap_tol = 0.0;
    double vol_ratio = 0.0;
    double vol_lo = 0.0;
    double vol_hi = 0.0;
    double eig_ratio = 0.0;  // 0 without an eigenvalue
    bool capacity_ok = true;
    bool eigen_ok = true;
};
IsoperimetricCheck isoperimetric_check(const ComponentRecord& rec, int d, double h);

double max_volume(const CensusReport& r);
double max_diameter(const CensusReport& r);
std::optional<double> min_eigenvalue(const CensusReport& r);

/// Greedy lower bound on the number of disjoint translates x + scale * E,
/// x on the cell-centre grid scanned in linear index order, whose cells all
/// lie in `vacant`. A translate claims every cell whose centre is within half
/// a cell diagonal of it, so claimed cells of different translates are
/// disjoint.
std::size_t disjoint_translates(const VoxelSet& vacant, const ShapeSpec& E, double scale);

}  // namespace vacant
