#include "vacant/capacity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>

#include "vacant/parallel.hpp"
#include "vacant/torus.hpp"

namespace vacant {

namespace {

// Fitted so that the unit-sphere clouds below give the unit-ball capacity:
// d = 3 Fibonacci with 2000 points, d = 4 cubed_sphere(m = 6), d = 5
// cubed_sphere(m = 4).
constexpr double kCPanel3 = 3.89898657;
constexpr double kCPanel4 = 8.83553582;
constexpr double kCPanel5 = 14.77480621;

}  // namespace

std::string to_string(CapMethod m) {
    switch (m) {
        case CapMethod::Analytic: return "analytic";
        case CapMethod::Wos: return "wos";
        case CapMethod::Energy: return "energy";
        case CapMethod::BallBound: return "ball_bound";
    }
    return "unknown";
}

CapacityEstimate cap_ball(double radius, Dim d) {
    if (radius < 0.0) throw std::invalid_argument("cap_ball: negative radius");
    CapacityEstimate e;
    e.value = kappa_d(d) * std::pow(radius, d - 2.0);
    return e;
}

Vec uniform_on_sphere(int d, CounterRng& rng) {
    Vec g(d);
    double n2 = 0.0;
    do {
        for (int k = 0; k < d; ++k) g[k] = rng.normal();
        n2 = g.squaredNorm();
    } while (n2 < 1e-300);
    return g / std::sqrt(n2);
}

Vec sample_poisson_kernel(const Vec& z, const Vec& c, double r0, CounterRng& rng) {
    const int d = static_cast<int>(z.size());
    const Vec rel = z - c;
    const double a = rel.norm() / r0;
    if (a >= 1.0) throw std::invalid_argument("poisson kernel: point not inside the ball");
    if (a < 1e-12) return c + r0 * uniform_on_sphere(d, rng);
    const Vec axis = rel / (a * r0);
    // u = cos(angle to axis). Proposal: the d = 3 law, density ~ (1 - 2au + a^2)^{-3/2},
    // inverted in closed form. For d > 3 accept with ((1-u^2)/(1-2au+a^2))^{(d-3)/2} <= 1.
    double u = 0.0;
    while (true) {
        const double U = rng.uniform();
        if (a < 1e-6) {
            u = 2.0 * U - 1.0;
        } else {
            const double lo = 1.0 / (1.0 + a);
            const double v = lo + U * (1.0 / (1.0 - a) - lo);
            u = std::clamp((1.0 + a * a - 1.0 / (v * v)) / (2.0 * a), -1.0, 1.0);
        }
        if (d == 3) break;
        const double ratio = (1.0 - u * u) / (1.0 - 2.0 * a * u + a * a);
        if (rng.uniform() <= std::pow(std::max(ratio, 0.0), 0.5 * (d - 3))) break;
    }
    Vec perp(d);
    double n2 = 0.0;
    do {
        for (int k = 0; k < d; ++k) perp[k] = rng.normal();
        perp -= perp.dot(axis) * axis;
        n2 = perp.squaredNorm();
    } while (n2 < 1e-24);
    perp /= std::sqrt(n2);
    return c + r0 * (u * axis + std::sqrt(std::max(0.0, 1.0 - u * u)) * perp);
}

Vec sample_exterior_return(const Vec& x, const Vec& c, double r0, CounterRng& rng) {
    const Vec rel = x - c;
    const double s2 = rel.squaredNorm();
    // Kelvin inversion: the conditioned exterior law is the harmonic measure
    // seen from the inverted point.
    return sample_poisson_kernel(c + (r0 * r0 / s2) * rel, c, r0, rng);
}

namespace {

enum class WalkEnd { Hit, Escape, Censored };

WalkEnd walk(Vec x, const DistanceOracle& dist, const Vec& c, double r0, double eps, int d,
             std::size_t max_steps, CounterRng& rng) {
    for (std::size_t step = 0; step < max_steps; ++step) {
        const double s = (x - c).norm();
        if (s > r0 * (1.0 + 1e-12)) {
            if (rng.uniform() >= std::pow(r0 / s, d - 2.0)) return WalkEnd::Escape;
            x = sample_exterior_return(x, c, r0, rng);
            continue;
        }
        const double delta = dist(x);
        if (delta <= eps) return WalkEnd::Hit;
        x += delta * uniform_on_sphere(d, rng);
    }
    return WalkEnd::Censored;
}

struct Tally {
    std::size_t hits = 0;
    std::size_t censored = 0;
};

Tally run_walkers(const std::function<Vec(CounterRng&)>& start, const DistanceOracle& dist, const Vec& c,
                  double r0, double eps, int d, const WosParams& params, std::uint64_t seed) {
    std::mutex mu;
    Tally total;
    parallel_for(params.walkers, params.threads, [&](std::size_t b, std::size_t e) {
        Tally local;
        for (std::size_t w = b; w < e; ++w) {
            CounterRng rng(mix_seed(seed, w), Stream::Walkers);
            const auto end = walk(start(rng), dist, c, r0, eps, d, params.max_steps, rng);
            if (end == WalkEnd::Hit) ++local.hits;
            if (end == WalkEnd::Censored) ++local.censored;
        }
        std::lock_guard<std::mutex> lock(mu);
        total.hits += local.hits;
        total.censored += local.censored;
    });
    return total;
}

}  // namespace

CapacityEstimate cap_wos(const DistanceOracle& dist, Dim d, const Vec& centre, double r0,
                         double epsilon_shell, const WosParams& params, std::uint64_t seed) {
    if (!(r0 > 0.0)) throw std::invalid_argument("cap_wos: launch radius must be positive");
    if (!(epsilon_shell > 0.0)) throw std::invalid_argument("cap_wos: absorption shell must be positive");
    if (params.walkers == 0) throw std::invalid_argument("cap_wos: need walkers");
    const int dd = d;
    const Tally t = run_walkers([&](CounterRng& rng) { return Vec(centre + r0 * uniform_on_sphere(dd, rng)); },
                                dist, centre, r0, epsilon_shell, dd, params, seed);
    const double n = static_cast<double>(params.walkers);
    if (static_cast<double>(t.censored) > 0.01 * n)
        throw CapacityError("cap_wos: " + std::to_string(t.censored) + " of " + std::to_string(params.walkers) +
                            " walkers censored at max_steps");
    const double p = static_cast<double>(t.hits) / n;
    const double scale = kappa_d(d) * std::pow(r0, d - 2.0);
    CapacityEstimate e;
    e.method = CapMethod::Wos;
    e.value = scale * p;
    e.std_error = scale * std::sqrt(p * (1.0 - p) / n);
    e.samples = params.walkers;
    e.censored = t.censored;
    return e;
}

CapacityEstimate cap_wos(const ShapeSpec& shape, const WosParams& params, std::uint64_t seed) {
    if (shape.empty()) return CapacityEstimate{0.0, 0.0, CapMethod::Wos, 0, 0};
    const Vec c = shape.bounding_centre();
    const double rb = shape.bounding_radius();
    const double r0 = params.enclose_radius > 0.0 ? params.enclose_radius : rb;
    if (rb > r0 * (1.0 + 1e-12)) throw std::invalid_argument("cap_wos: shape not inside the launch sphere");
    const double eps = params.epsilon_shell > 0.0 ? params.epsilon_shell : 1e-4 * shape.diameter_bound();
    return cap_wos([&shape](const Vec& x) { return shape.distance(x); }, Dim(shape.dim()), c, r0, eps, params,
                   seed);
}

SurfaceCloud& SurfaceCloud::append(const SurfaceCloud& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    areas.insert(areas.end(), other.areas.begin(), other.areas.end());
    return *this;
}

SurfaceCloud fibonacci_sphere(std::size_t n, double radius, const Vec& centre) {
    SurfaceCloud c;
    c.d = 3;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double area = 4.0 * std::numbers::pi * radius * radius / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = golden * static_cast<double>(i);
        Vec p(3);
        p << r * std::cos(th), r * std::sin(th), z;
        c.points.push_back(centre + radius * p);
        c.areas.push_back(area);
    }
    return c;
}

SurfaceCloud cubed_sphere(int d, int m, double radius, const Vec& centre) {
    SurfaceCloud c;
    c.d = d;
    const double step = 2.0 / m;
    const double face_area = std::pow(step, d - 1.0);
    const auto per_face = static_cast<std::size_t>(std::pow(m, d - 1));
    for (int axis = 0; axis < d; ++axis) {
        for (int sign : {-1, 1}) {
            for (std::size_t f = 0; f < per_face; ++f) {
                Vec p(d);
                std::size_t r = f;
                for (int k = 0; k < d; ++k) {
                    if (k == axis) {
                        p[k] = sign;
                        continue;
                    }
                    p[k] = -1.0 + step * (static_cast<double>(r % static_cast<std::size_t>(m)) + 0.5);
                    r /= static_cast<std::size_t>(m);
                }
                const double norm = p.norm();
                c.points.push_back(centre + (radius / norm) * p);
                c.areas.push_back(face_area * std::pow(radius, d - 1.0) / std::pow(norm, d));
            }
        }
    }
    return c;
}

SurfaceCloud cube_surface(int m, double side, const Vec& centre) {
    SurfaceCloud c;
    c.d = 3;
    const double step = side / m;
    const double area = step * step;
    for (int axis = 0; axis < 3; ++axis) {
        for (int sign : {-1, 1}) {
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    Vec p(3);
                    p[axis] = 0.5 * side * sign;
                    p[(axis + 1) % 3] = -0.5 * side + (i + 0.5) * step;
                    p[(axis + 2) % 3] = -0.5 * side + (j + 0.5) * step;
                    c.points.push_back(centre + p);
                    c.areas.push_back(area);
                }
            }
        }
    }
    return c;
}

double c_panel(Dim d) {
    switch (d.value()) {
        case 3: return kCPanel3;
        case 4: return kCPanel4;
        case 5: return kCPanel5;
        default: throw std::invalid_argument("c_panel: only calibrated for d = 3, 4, 5");
    }
}

CapacityEstimate cap_energy(const SurfaceCloud& cloud, double c) {
    const std::size_t n = cloud.points.size();
    if (n == 0) throw std::invalid_argument("cap_energy: empty cloud");
    if (cloud.areas.size() != n) throw std::invalid_argument("cap_energy: one area per point");
    const Dim d(cloud.d);
    if (c <= 0.0) c = c_panel(d);
    const double kd = kappa_d(d);
    CapacityEstimate est;
    est.method = CapMethod::Energy;
    est.samples = n;
    if (n == 1) {
        // A single point of zero area carries infinite energy.
        if (cloud.areas[0] <= 0.0) return est;
    }
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd G(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double h = std::pow(cloud.areas[i], 1.0 / (d - 1.0));
        G(i, i) = h > 0.0 ? c / (kd * std::pow(h, d - 2.0)) : std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < i; ++j) {
            const double r = (cloud.points[i] - cloud.points[j]).norm();
            if (r < 1e-12) throw CapacityError("cap_energy: coincident points");
            G(i, j) = G(j, i) = 1.0 / (kd * std::pow(r, d - 2.0));
        }
    }
    for (Eigen::Index i = 0; i < N; ++i)
        if (!std::isfinite(G(i, i))) throw CapacityError("cap_energy: zero-area panel");

    // Active-set solve of min w^T G w, sum w = 1, w >= 0: on the free set F,
    // w_F is proportional to G_FF^{-1} 1 and the energy is 1 / sum(G_FF^{-1} 1).
    std::vector<char> free(n, 1);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(N);
    double energy = 0.0;
    for (std::size_t iter = 0; iter < 2 * n + 2; ++iter) {
        std::vector<Eigen::Index> F;
        for (std::size_t i = 0; i < n; ++i)
            if (free[i]) F.push_back(static_cast<Eigen::Index>(i));
        const auto m = static_cast<Eigen::Index>(F.size());
        Eigen::MatrixXd GF(m, m);
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < m; ++b) GF(a, b) = G(F[a], F[b]);
        const Eigen::VectorXd z = GF.ldlt().solve(Eigen::VectorXd::Ones(m));
        if (z.minCoeff() <= 0.0) {
            for (Eigen::Index a = 0; a < m; ++a)
                if (z[a] <= 0.0) free[static_cast<std::size_t>(F[a])] = 0;
            continue;
        }
        const double sum = z.sum();
        w.setZero();
        for (Eigen::Index a = 0; a < m; ++a) w[F[a]] = z[a] / sum;
        energy = 1.0 / sum;
        // KKT: every excluded point must see potential >= energy.
        const Eigen::VectorXd pot = G * w;
        std::size_t add = n;
        double lowest = energy * (1.0 - 1e-10);
        for (std::size_t i = 0; i < n; ++i)
            if (!free[i] && pot[static_cast<Eigen::Index>(i)] < lowest) {
                lowest = pot[static_cast<Eigen::Index>(i)];
                add = i;
            }
        if (add == n) break;
        free[add] = 1;
    }
    est.value = 1.0 / energy;
    return est;
}

CapacityEstimate cap_energy_refined(const std::function<SurfaceCloud(std::size_t)>& cloud_at, std::size_t n,
                                    double c) {
    CapacityEstimate fine = cap_energy(cloud_at(n), c);
    const CapacityEstimate coarse = cap_energy(cloud_at(std::max<std::size_t>(n / 2, 2)), c);
    fine.std_error = std::abs(fine.value - coarse.value);
    return fine;
}

DistanceOracle voxel_oracle(const VoxelCloud& cloud, double exact_within) {
    const int d = cloud.d;
    const double h = cloud.h;
    IVec lo = cloud.cells.front(), hi = cloud.cells.front();
    for (const auto& c : cloud.cells) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    const int pad = static_cast<int>(std::ceil(exact_within / h)) + 2;
    IVec origin = lo.array() - pad;
    std::vector<int> dims(static_cast<std::size_t>(d));
    std::vector<std::size_t> strides(static_cast<std::size_t>(d));
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
        dims[k] = hi[k] - lo[k] + 1 + 2 * pad;
        strides[k] = total;
        total *= static_cast<std::size_t>(dims[k]);
    }
    auto mask = std::make_shared<std::vector<std::uint8_t>>(total, 0);
    auto index = [=](const IVec& p) {
        std::size_t i = 0;
        for (int k = 0; k < d; ++k) i += static_cast<std::size_t>(p[k] - origin[k]) * strides[k];
        return i;
    };
    for (const auto& c : cloud.cells) (*mask)[index(c)] = 1;
    auto sq = std::make_shared<std::vector<std::int32_t>>(squared_distance_transform_box(*mask, dims));
    const Vec box_lo = lo.cast<double>() * h;
    const Vec box_hi = hi.cast<double>() * h;
    const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(d));

    return [=](const Vec& x) -> double {
        IVec q(d);
        bool inside = true;
        for (int k = 0; k < d; ++k) {
            q[k] = static_cast<int>(std::lround(x[k] / h));
            if (q[k] < origin[k] || q[k] >= origin[k] + dims[k]) inside = false;
        }
        if (!inside) return dist_point_box(x, box_lo, box_hi);
        const double e = std::sqrt(static_cast<double>((*sq)[index(q)])) * h;
        if (e - half_diag > exact_within) return e - half_diag;
        // Exact: nearest site lies within e + half_diag of x.
        const int k = static_cast<int>(std::ceil((e + half_diag) / h));
        double best = std::numeric_limits<double>::infinity();
        IVec off = IVec::Constant(d, -k);
        while (true) {
            IVec p = q + off;
            bool ok = true;
            for (int a = 0; a < d; ++a)
                if (p[a] < origin[a] || p[a] >= origin[a] + dims[a]) ok = false;
            if (ok && (*mask)[index(p)]) best = std::min(best, (x - p.cast<double>() * h).norm());
            int a = 0;
            while (a < d && off[a] == k) off[a++] = -k;
            if (a == d) break;
            ++off[a];
        }
        return best;
    };
}

CapacityEstimate cap_voxelset(const VoxelCloud& cloud, const WosParams& params, std::uint64_t seed) {
    if (cloud.cells.empty()) return CapacityEstimate{0.0, 0.0, CapMethod::Wos, 0, 0};
    const int d = cloud.d;
    const double h = cloud.h;
    const double eps = params.epsilon_shell > 0.0 ? params.epsilon_shell : 0.5 * h * std::sqrt(double(d));
    IVec lo = cloud.cells.front(), hi = cloud.cells.front();
    for (const auto& c : cloud.cells) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    const Vec centre = 0.5 * (lo + hi).cast<double>() * h;
    double r0 = 0.0;
    for (const auto& c : cloud.cells) r0 = std::max(r0, (c.cast<double>() * h - centre).norm());
    r0 += eps;
    if (params.enclose_radius > r0) r0 = params.enclose_radius;
    return cap_wos(voxel_oracle(cloud, 4.0 * eps), Dim(d), centre, r0, eps, params, seed);
}

std::vector<HittingRow> hitting_decay_check(const ShapeSpec& shape, const std::vector<double>& distances,
                                            const WosParams& params, std::uint64_t seed) {
    const int d = shape.dim();
    const Vec c = shape.bounding_centre();
    const double r0 = shape.bounding_radius();
    const double eps = params.epsilon_shell > 0.0 ? params.epsilon_shell : 1e-4 * shape.diameter_bound();
    const DistanceOracle dist = [&shape](const Vec& x) { return shape.distance(x); };
    std::vector<HittingRow> rows;
    for (std::size_t j = 0; j < distances.size(); ++j) {
        const double s = distances[j];
        Vec x = c;
        x[0] += s;
        const Tally t = run_walkers([&](CounterRng&) { return x; }, dist, c, r0, eps, d, params,
                                    mix_seed(seed, j));
        HittingRow row;
        row.s = s;
        const double n = static_cast<double>(params.walkers);
        row.p = static_cast<double>(t.hits) / n;
        row.std_error = std::sqrt(row.p * (1.0 - row.p) / n);
        row.scaled = std::pow(s, d - 2.0) * row.p;
        row.scaled_error = std::pow(s, d - 2.0) * row.std_error;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace vacant
