#include "vacant/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace vacant {

double dist_point_segment(const Vec& p, const Vec& a, const Vec& b) {
    const Vec u = b - a;
    const double len2 = u.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double s = std::clamp((p - a).dot(u) / len2, 0.0, 1.0);
    return (p - (a + s * u)).norm();
}

double dist_segment_segment(const Vec& a0, const Vec& a1, const Vec& b0, const Vec& b1) {
    // Closest points of two segments (Ericson, Real-Time Collision Detection 5.1.9).
    const Vec d1 = a1 - a0;
    const Vec d2 = b1 - b0;
    const Vec r = a0 - b0;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0, t = 0.0;
    if (a == 0.0 && e == 0.0) return r.norm();
    if (a == 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e == 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((a0 + s * d1) - (b0 + t * d2)).norm();
}

double dist_point_box(const Vec& p, const Vec& lo, const Vec& hi) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double g = std::max({lo[k] - p[k], 0.0, p[k] - hi[k]});
        acc += g * g;
    }
    return std::sqrt(acc);
}

double signed_dist_point_box(const Vec& p, const Vec& lo, const Vec& hi) {
    const double out = dist_point_box(p, lo, hi);
    if (out > 0.0) return out;
    double depth = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < p.size(); ++k) depth = std::min({depth, p[k] - lo[k], hi[k] - p[k]});
    return -depth;
}

double dist_segment_box(const Vec& a, const Vec& b, const Vec& lo, const Vec& hi) {
    // The squared distance along the segment is a sum of per-axis piecewise
    // quadratics; between consecutive breakpoints it is a single quadratic.
    const Eigen::Index d = a.size();
    const Vec u = b - a;
    std::vector<double> cuts = {0.0, 1.0};
    for (Eigen::Index k = 0; k < d; ++k) {
        if (u[k] == 0.0) continue;
        for (double bound : {lo[k], hi[k]}) {
            const double s = (bound - a[k]) / u[k];
            if (s > 0.0 && s < 1.0) cuts.push_back(s);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double s0 = cuts[i], s1 = cuts[i + 1];
        const double mid = 0.5 * (s0 + s1);
        double qa = 0.0, qb = 0.0, qc = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
            const double x = a[k] + mid * u[k];
            double bound;
            if (x < lo[k]) bound = lo[k];
            else if (x > hi[k]) bound = hi[k];
            else continue;
            // (a_k + s u_k - bound)^2
            const double off = a[k] - bound;
            qa += u[k] * u[k];
            qb += 2.0 * off * u[k];
            qc += off * off;
        }
        double s = s0;
        if (qa > 0.0) s = std::clamp(-qb / (2.0 * qa), s0, s1);
        else if (qb < 0.0) s = s1;
        const double val = std::max(0.0, (qa * s + qb) * s + qc);
        best = std::min(best, val);
    }
    return std::sqrt(best);
}

double dist_box_box(const Vec& lo0, const Vec& hi0, const Vec& lo1, const Vec& hi1) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < lo0.size(); ++k) {
        const double g = std::max({lo1[k] - hi0[k], 0.0, lo0[k] - hi1[k]});
        acc += g * g;
    }
    return std::sqrt(acc);
}

}  // namespace vacant
