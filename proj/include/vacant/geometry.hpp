#pragma once

// Euclidean distance primitives in R^d shared by shapes, walkers and the
// lattice-animal cube tests.

#include <Eigen/Dense>

namespace vacant {

inline constexpr int kMaxDim = 8;

/// Dynamic-size vector with inline storage for up to kMaxDim entries.
template <class Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

using Vec = VecX<double>;
using IVec = VecX<int>;

double dist_point_segment(const Vec& p, const Vec& a, const Vec& b);
double dist_segment_segment(const Vec& a0, const Vec& a1, const Vec& b0, const Vec& b1);

/// Distance from p to the box [lo, hi]; zero inside.
double dist_point_box(const Vec& p, const Vec& lo, const Vec& hi);
/// Signed distance to the box: negative inside (minus the depth to the nearest face).
double signed_dist_point_box(const Vec& p, const Vec& lo, const Vec& hi);
/// Exact minimum distance between the segment [a, b] and the box [lo, hi].
double dist_segment_box(const Vec& a, const Vec& b, const Vec& lo, const Vec& hi);
double dist_box_box(const Vec& lo0, const Vec& hi0, const Vec& lo1, const Vec& hi1);

}  // namespace vacant
