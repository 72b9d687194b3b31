#pragma once

// Geometry of the flat unit torus R^d / Z^d: points, grids, voxel occupancy
// sets and exact periodic Euclidean distance transforms.
//
// Voxel convention: cell i of a grid has centre offset + i/n, and a cell is
// occupied iff its centre lies in the continuum set it represents. The one
// exception is the radius-zero path raster, which marks every cell the
// polyline passes through.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "vacant/geometry.hpp"

namespace vacant {

/// Reduce each coordinate into [0, 1).
Vec wrap_coords(const Vec& x);
/// Minimal-image representative of a displacement: each entry in [-1/2, 1/2).
Vec min_image(const Vec& delta);

class TorusPoint {
  public:
    explicit TorusPoint(const Vec& coords);
    explicit TorusPoint(int d) : coords_(Vec::Zero(d)) {}

    const Vec& coords() const { return coords_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    double operator[](int k) const { return coords_[k]; }

    TorusPoint translated(const Vec& v) const { return TorusPoint(coords_ + v); }

  private:
    Vec coords_;
};

/// Flat torus distance: minimum over integer shifts, in [0, sqrt(d)/2].
double torus_dist(const TorusPoint& x, const TorusPoint& y);

struct GridSpec {
    int d = 3;
    int n = 2;
    Vec offset;

    /// Grid whose points sit at cell centres (offset 1/(2n) on every axis).
    static GridSpec centred(int d, int n);

    void validate() const;
    double cell() const { return 1.0 / n; }
    double half_diagonal() const;
    std::size_t cell_count() const;
    Vec centre(const IVec& idx) const;
    /// Index of the cell whose centre is nearest to x, wrapped into [0, n).
    IVec cell_of(const Vec& x) const;
};

/// The n^d grid points offset + Z^d / n.
std::vector<TorusPoint> grid_points(const GridSpec& spec);

class VoxelSet {
  public:
    explicit VoxelSet(GridSpec grid, bool filled = false);

    const GridSpec& grid() const { return grid_; }
    int dim() const { return grid_.d; }
    int n() const { return grid_.n; }
    std::size_t size() const { return occ_.size(); }
    std::size_t stride(int axis) const { return strides_[axis]; }

    bool test(std::size_t i) const { return occ_[i] != 0; }
    void set(std::size_t i, bool v = true) { occ_[i] = v ? 1 : 0; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    bool full() const { return count() == size(); }

    /// Linear index (axis 0 fastest) of an index tuple, wrapped periodically.
    std::size_t index(const IVec& idx) const;
    IVec coords(std::size_t i) const;

    VoxelSet complement() const;
    bool subset_of(const VoxelSet& other) const;
    VoxelSet& operator|=(const VoxelSet& other);

    std::span<const std::uint8_t> data() const { return occ_; }
    std::span<std::uint8_t> data() { return occ_; }

    friend bool operator==(const VoxelSet& a, const VoxelSet& b);

  private:
    GridSpec grid_;
    std::vector<std::size_t> strides_;
    std::vector<std::uint8_t> occ_;
};

/// Raised when a distance transform is requested with no sites.
class NoSitesError : public std::runtime_error {
  public:
    NoSitesError() : std::runtime_error("distance transform: no sites") {}
};

/// Exact squared Euclidean distance (in cell units, so integral) from every
/// cell centre to the nearest occupied cell centre, periodic on all axes.
std::vector<std::int32_t> squared_distance_transform(const VoxelSet& sites, int threads = 1);

/// Same as above in torus length units.
std::vector<double> distance_transform(const VoxelSet& sites, int threads = 1);

/// Non-periodic squared EDT on a box grid; mask entries nonzero are sites.
/// Cells with no reachable site get the value `unreachable`.
std::vector<std::int32_t> squared_distance_transform_box(std::span<const std::uint8_t> mask,
                                                         std::span<const int> dims);

/// Cells whose centre lies within r of an occupied centre.
VoxelSet enlarge(const VoxelSet& v, double r, int threads = 1);
/// Complement of the r-enlargement of the complement.
VoxelSet shrink(const VoxelSet& v, double r, int threads = 1);

/// Binary layout (all little-endian):
///   "VXST" | u32 version=1 | u32 d | u32 n | f64[d] offset | u64 cells |
///   ceil(cells/8) bytes, bit j of byte k is cell 8k+j (axis 0 fastest).
void write_voxelset(std::ostream& os, const VoxelSet& v);
VoxelSet read_voxelset(std::istream& is);

}  // namespace vacant
