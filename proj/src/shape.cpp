#include "vacant/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vacant/boxgrid.hpp"

namespace vacant {

Primitive Primitive::ball(const Vec& centre, double radius) {
    if (radius < 0.0) throw std::invalid_argument("ball: negative radius");
    return Primitive{Core::Point, centre, centre, radius};
}

Primitive Primitive::box(const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size() || (hi - lo).minCoeff() < 0.0)
        throw std::invalid_argument("box: need lo <= hi");
    return Primitive{Core::Box, lo, hi, 0.0};
}

Primitive Primitive::segment(const Vec& a, const Vec& b, double radius) {
    if (radius < 0.0) throw std::invalid_argument("segment: negative radius");
    return Primitive{Core::Segment, a, b, radius};
}

double Primitive::signed_distance(const Vec& p) const {
    switch (core) {
        case Core::Point: return (p - a).norm() - inflation;
        case Core::Segment: return dist_point_segment(p, a, b) - inflation;
        case Core::Box: return signed_dist_point_box(p, a, b) - inflation;
    }
    return std::numeric_limits<double>::infinity();
}

double Primitive::distance_to_segment(const Vec& p, const Vec& q) const {
    double raw = 0.0;
    switch (core) {
        case Core::Point: raw = dist_point_segment(a, p, q); break;
        case Core::Segment: raw = dist_segment_segment(a, b, p, q); break;
        case Core::Box: raw = dist_segment_box(p, q, a, b); break;
    }
    return std::max(0.0, raw - inflation);
}

double Primitive::distance_to_box(const Vec& lo, const Vec& hi) const {
    double raw = 0.0;
    switch (core) {
        case Core::Point: raw = dist_point_box(a, lo, hi); break;
        case Core::Segment: raw = dist_segment_box(a, b, lo, hi); break;
        case Core::Box: raw = dist_box_box(a, b, lo, hi); break;
    }
    return std::max(0.0, raw - inflation);
}

void Primitive::bounds(Vec& lo, Vec& hi) const {
    lo = a.cwiseMin(b).array() - inflation;
    hi = a.cwiseMax(b).array() + inflation;
}

ShapeSpec::ShapeSpec(int d, std::vector<Primitive> parts) : d_(d) {
    for (auto& p : parts) add(std::move(p));
}

ShapeSpec ShapeSpec::ball(const Vec& centre, double radius) {
    ShapeSpec s(static_cast<int>(centre.size()));
    s.add(Primitive::ball(centre, radius));
    s.capacity_regular = radius > 0.0;
    return s;
}

ShapeSpec ShapeSpec::box(const Vec& lo, const Vec& hi) {
    ShapeSpec s(static_cast<int>(lo.size()));
    s.add(Primitive::box(lo, hi));
    s.capacity_regular = (hi - lo).minCoeff() > 0.0;
    return s;
}

ShapeSpec ShapeSpec::segment(const Vec& a, const Vec& b, double radius) {
    ShapeSpec s(static_cast<int>(a.size()));
    s.add(Primitive::segment(a, b, radius));
    s.capacity_regular = radius > 0.0;
    return s;
}

ShapeSpec& ShapeSpec::add(Primitive p) {
    if (p.a.size() != d_ || p.b.size() != d_) throw std::invalid_argument("shape: dimension mismatch");
    parts_.push_back(std::move(p));
    connected_complement_verified.reset();
    return *this;
}

ShapeSpec ShapeSpec::united(const ShapeSpec& other) const {
    ShapeSpec u(*this);
    for (const auto& p : other.parts_) u.add(p);
    u.capacity_regular = capacity_regular && other.capacity_regular;
    return u;
}

double ShapeSpec::signed_distance(const Vec& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& prim : parts_) best = std::min(best, prim.signed_distance(p));
    return best;
}

double ShapeSpec::distance(const Vec& p) const { return std::max(0.0, signed_distance(p)); }

double ShapeSpec::distance_to_segment(const Vec& p, const Vec& q) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& prim : parts_) best = std::min(best, prim.distance_to_segment(p, q));
    return best;
}

double ShapeSpec::distance_to_box(const Vec& lo, const Vec& hi) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& prim : parts_) best = std::min(best, prim.distance_to_box(lo, hi));
    return best;
}

void ShapeSpec::bounds(Vec& lo, Vec& hi) const {
    if (parts_.empty()) throw std::logic_error("shape: bounds of empty shape");
    parts_.front().bounds(lo, hi);
    for (const auto& prim : parts_) {
        Vec l, h;
        prim.bounds(l, h);
        lo = lo.cwiseMin(l);
        hi = hi.cwiseMax(h);
    }
}

Vec ShapeSpec::bounding_centre() const {
    Vec lo, hi;
    bounds(lo, hi);
    return 0.5 * (lo + hi);
}

double ShapeSpec::bounding_radius() const {
    const Vec c = bounding_centre();
    double r = 0.0;
    for (const auto& prim : parts_) {
        switch (prim.core) {
            case Primitive::Core::Point: r = std::max(r, (prim.a - c).norm() + prim.inflation); break;
            case Primitive::Core::Segment:
                r = std::max({r, (prim.a - c).norm() + prim.inflation,
                              (prim.b - c).norm() + prim.inflation});
                break;
            case Primitive::Core::Box: {
                Vec far(d_);
                for (int k = 0; k < d_; ++k)
                    far[k] = std::max(std::abs(prim.a[k] - c[k]), std::abs(prim.b[k] - c[k]));
                r = std::max(r, far.norm() + prim.inflation);
                break;
            }
        }
    }
    return r;
}

double ShapeSpec::diameter_bound() const { return 2.0 * bounding_radius(); }

ShapeSpec ShapeSpec::translated(const Vec& v) const {
    ShapeSpec s(*this);
    for (auto& p : s.parts_) {
        p.a += v;
        p.b += v;
    }
    return s;
}

ShapeSpec ShapeSpec::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("shape: scale must be positive");
    ShapeSpec s(*this);
    for (auto& p : s.parts_) {
        p.a *= factor;
        p.b *= factor;
        p.inflation *= factor;
    }
    return s;
}

ShapeSpec ShapeSpec::enlarged(double r) const {
    if (r < 0.0) throw std::invalid_argument("shape: negative enlargement");
    ShapeSpec s(*this);
    for (auto& p : s.parts_) p.inflation += r;
    if (r > 0.0) s.capacity_regular = true;
    return s;
}

ShapeSpec ShapeSpec::shrunk(double r) const {
    if (r < 0.0) throw std::invalid_argument("shape: negative shrink");
    if (r == 0.0 || parts_.empty()) return *this;
    if (parts_.size() != 1)
        throw std::logic_error("shape: shrinking a union has no closed form; rasterize it first");
    Primitive p = parts_.front();
    ShapeSpec s(d_);
    s.capacity_regular = capacity_regular;
    if (r <= p.inflation) {
        p.inflation -= r;
        s.add(p);
        return s;
    }
    // (K + iB) - rB = K - (r - i)B for convex K.
    if (p.core != Primitive::Core::Box) return s;
    const double cut = r - p.inflation;
    Vec lo = p.a.array() + cut;
    Vec hi = p.b.array() - cut;
    if ((hi - lo).minCoeff() < 0.0) return s;
    s.add(Primitive::box(lo, hi));
    return s;
}

VoxelSet ShapeSpec::rasterize(const GridSpec& grid, const Vec& placement, double scale) const {
    VoxelSet out(grid);
    if (parts_.empty()) return out;
    if (grid.d != d_) throw std::invalid_argument("shape: grid dimension mismatch");
    Vec lo, hi;
    bounds(lo, hi);
    lo = placement + scale * lo;
    hi = placement + scale * hi;
    IVec first(d_), count(d_);
    for (int k = 0; k < d_; ++k) {
        const auto a = static_cast<int>(std::ceil((lo[k] - grid.offset[k]) * grid.n - 1e-9));
        const auto b = static_cast<int>(std::floor((hi[k] - grid.offset[k]) * grid.n + 1e-9));
        first[k] = a;
        count[k] = std::max(0, b - a + 1);
        if (count[k] == 0) return out;
    }
    const BoxGrid box(first, count);
    for (std::size_t i = 0; i < box.size(); ++i) {
        const IVec idx = box.point(i);
        const Vec c = grid.centre(idx);
        if (contains((c - placement) / scale)) out.set(out.index(idx));
    }
    return out;
}

bool ShapeSpec::verify_connected_class(int cells_per_unit) {
    if (parts_.empty()) {
        connected_complement_verified = false;
        return false;
    }
    Vec lo, hi;
    bounds(lo, hi);
    const double h = 1.0 / cells_per_unit;
    IVec origin(d_), dims(d_);
    for (int k = 0; k < d_; ++k) {
        origin[k] = static_cast<int>(std::floor(lo[k] / h)) - 2;
        dims[k] = static_cast<int>(std::ceil(hi[k] / h)) + 3 - origin[k];
    }
    const BoxGrid box(origin, dims);
    std::vector<std::uint8_t> mask(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        const Vec c = box.point(i).cast<double>() * h;
        mask[i] = contains(c) ? 1 : 0;
    }
    std::vector<int> labels;
    const int inside = box.label(mask, 1, false, labels);
    const int outside = box.label(mask, 0, true, labels);
    connected_complement_verified = inside == 1 && outside == 1;
    return *connected_complement_verified;
}

ShapeSpec l_shape(int d, double arm, double w) {
    Vec lo0 = Vec::Zero(d), hi0 = Vec::Constant(d, w);
    Vec lo1 = Vec::Zero(d), hi1 = Vec::Constant(d, w);
    hi0[0] = arm;
    hi1[1] = arm;
    ShapeSpec s(d);
    s.add(Primitive::box(lo0, hi0));
    s.add(Primitive::box(lo1, hi1));
    s.capacity_regular = true;
    return s;
}

}  // namespace vacant
