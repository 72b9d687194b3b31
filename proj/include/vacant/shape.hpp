#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vacant/geometry.hpp"
#include "vacant/torus.hpp"

namespace vacant {

/// A convex building block: a core (point, segment or axis box) thickened by
/// a closed ball of radius `inflation`. Balls are inflated points and tubes
/// are inflated segments; r-enlargement just adds r to the inflation.
struct Primitive {
    enum class Core { Point, Segment, Box };

    Core core = Core::Point;
    Vec a;  // point, segment start, or box lower corner
    Vec b;  // segment end or box upper corner (unused for points)
    double inflation = 0.0;

    static Primitive ball(const Vec& centre, double radius);
    static Primitive box(const Vec& lo, const Vec& hi);
    static Primitive segment(const Vec& a, const Vec& b, double radius = 0.0);

    /// Distance from p to the core minus the inflation (negative inside).
    double signed_distance(const Vec& p) const;
    /// Exact distance from the segment [p, q] to this primitive (0 if they meet).
    double distance_to_segment(const Vec& p, const Vec& q) const;
    /// Exact distance from the closed box [lo, hi] to this primitive.
    double distance_to_box(const Vec& lo, const Vec& hi) const;
    void bounds(Vec& lo, Vec& hi) const;
};

/// A bounded subset of R^d given as a finite union of primitives.
///
/// Class flags: `capacity_regular` (Cap E = Cap int E) is a declared
/// attribute and never inferred. `connected_complement_verified` is set only
/// by verify_connected_class(), which checks connectivity of the shape and of
/// its complement on a rasterization.
class ShapeSpec {
  public:
    explicit ShapeSpec(int d) : d_(d) {}
    ShapeSpec(int d, std::vector<Primitive> parts);

    static ShapeSpec ball(const Vec& centre, double radius);
    static ShapeSpec box(const Vec& lo, const Vec& hi);
    static ShapeSpec segment(const Vec& a, const Vec& b, double radius = 0.0);

    int dim() const { return d_; }
    bool empty() const { return parts_.empty(); }
    const std::vector<Primitive>& parts() const { return parts_; }

    ShapeSpec& add(Primitive p);
    ShapeSpec united(const ShapeSpec& other) const;

    /// Union distance: exact outside the shape, an upper bound on depth inside.
    double signed_distance(const Vec& p) const;
    double distance(const Vec& p) const;
    bool contains(const Vec& p) const { return signed_distance(p) <= 0.0; }
    double distance_to_segment(const Vec& p, const Vec& q) const;
    double distance_to_box(const Vec& lo, const Vec& hi) const;

    void bounds(Vec& lo, Vec& hi) const;
    Vec bounding_centre() const;
    /// Radius of a ball about bounding_centre() that contains the shape.
    double bounding_radius() const;
    double diameter_bound() const;

    ShapeSpec translated(const Vec& v) const;
    ShapeSpec scaled(double factor) const;
    /// E_r: exact for any union.
    ShapeSpec enlarged(double r) const;
    /// E_{-r}: closed-form only for a single convex primitive; throws otherwise.
    ShapeSpec shrunk(double r) const;

    /// Cells (wrapped onto the torus grid) whose centres lie in x + scale * E.
    VoxelSet rasterize(const GridSpec& grid, const Vec& placement, double scale = 1.0) const;

    bool capacity_regular = false;
    std::optional<bool> connected_complement_verified;

    /// Rasterize at `cells` per unit length and check that the shape is
    /// connected (3^d-1 adjacency) and its complement is connected (face
    /// adjacency). Records the outcome in connected_complement_verified.
    bool verify_connected_class(int cells_per_unit);

  private:
    int d_;
    std::vector<Primitive> parts_;
};

/// L-shaped union of two boxes in the (x0, x1) plane, thickness `w`.
ShapeSpec l_shape(int d, double arm, double w);

}  // namespace vacant
