#include "vacant/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vacant {

namespace {

constexpr std::uint64_t kMaxMaterializedSteps = 50'000'000;

int wrap_index(long long i, int n) {
    long long r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

// Smallest s in [from, 1] with |p + s u| = rad, if any.
std::optional<double> first_crossing(const Vec& p, const Vec& u, double rad, double from) {
    const double A = u.squaredNorm();
    const double B = 2.0 * p.dot(u);
    const double C = p.squaredNorm() - rad * rad;
    if (A == 0.0) {
        if (C == 0.0) return from;
        return std::nullopt;
    }
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (B + std::copysign(sq, B));
    double r1 = q / A;
    double r2 = q != 0.0 ? C / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    for (double r : {r1, r2}) {
        if (r >= from - 1e-14 && r <= 1.0 + 1e-14) return std::clamp(r, from, 1.0);
    }
    return std::nullopt;
}

// Image of x nearest to the unwrapped point m.
Vec nearest_image(const Vec& x, const Vec& m) {
    Vec c = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) c[k] += std::round(m[k] - x[k]);
    return c;
}

}  // namespace

SimConfig SimConfig::make(Dim d, double t_max, double rho, int n, std::uint64_t seed) {
    SimConfig c;
    c.d = d;
    c.t_max = t_max;
    c.rho = rho;
    c.seed = seed;
    c.grid = GridSpec::centred(d, n);
    c.start = Vec::Zero(d);
    c.dt = c.max_dt();
    return c;
}

double SimConfig::max_dt() const {
    const double h = rho > 0.0 ? rho : 1.0 / grid.n;
    return h * h / 16.0;
}

std::uint64_t SimConfig::steps() const {
    if (t_max <= 0.0) return 0;
    return static_cast<std::uint64_t>(std::ceil(t_max / dt - 1e-9));
}

void SimConfig::validate() const {
    if (d < 3) throw ConfigError("d must be at least 3");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be finite and >= 0");
    if (!(rho >= 0.0)) throw ConfigError("rho must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (dt > max_dt() * (1.0 + 1e-12))
        throw ConfigError("dt exceeds the anti-tunneling bound " + std::to_string(max_dt()));
    if (grid.d != d) throw ConfigError("grid dimension differs from d");
    try {
        grid.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (start.size() != d) throw ConfigError("start point dimension differs from d");
}

BrownianPath BrownianPath::from_points(const std::vector<double>& times, const std::vector<Vec>& pts) {
    if (times.size() != pts.size() || pts.empty())
        throw std::invalid_argument("path: need matching, nonempty times and points");
    BrownianPath p;
    p.d = static_cast<int>(pts.front().size());
    p.times = times;
    p.positions.resize(p.d, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0 && times[i] < times[i - 1]) throw std::invalid_argument("path: times must not decrease");
        p.positions.col(static_cast<Eigen::Index>(i)) = pts[i];
    }
    return p;
}

PathWalker::PathWalker(const SimConfig& cfg)
    : cfg_(cfg),
      rng_(cfg.seed, Stream::Path),
      total_steps_(cfg.steps()),
      blocks_per_step_(static_cast<std::uint64_t>((cfg.d + 1) / 2)) {
    cfg_.validate();
    state_.position = cfg.start;
}

bool PathWalker::step(Vec& from, Vec& to, double& t0, double& t1) {
    if (done()) return false;
    const std::uint64_t k = state_.step;
    rng_.seek(k * blocks_per_step_);
    t0 = state_.time;
    t1 = (k + 1 == total_steps_) ? cfg_.t_max : static_cast<double>(k + 1) * cfg_.dt;
    const double sd = std::sqrt(t1 - t0);
    from = state_.position;
    to = from;
    for (int i = 0; i < cfg_.d; ++i) to[i] += sd * rng_.normal();
    state_.step = k + 1;
    state_.time = t1;
    state_.position = to;
    return true;
}

BrownianPath simulate_path(const SimConfig& cfg) {
    cfg.validate();
    const std::uint64_t steps = cfg.steps();
    if (steps > kMaxMaterializedSteps)
        throw ConfigError("path of " + std::to_string(steps) +
                          " steps is too long to hold in memory; stream it instead");
    BrownianPath p;
    p.d = cfg.d;
    p.times.reserve(steps + 1);
    p.positions.resize(cfg.d, static_cast<Eigen::Index>(steps + 1));
    p.times.push_back(0.0);
    p.positions.col(0) = cfg.start;
    PathWalker w(cfg);
    Vec a, b;
    double t0, t1;
    Eigen::Index col = 1;
    while (w.step(a, b, t0, t1)) {
        p.times.push_back(t1);
        p.positions.col(col++) = b;
    }
    return p;
}

SausageRaster::SausageRaster(const GridSpec& grid, double rho)
    : voxels_(grid), rho_(rho), coarse_(rho > 0.0 && grid.cell() > rho / 2.0) {
    if (rho < 0.0) throw std::invalid_argument("sausage: negative radius");
}

void SausageRaster::mark(std::size_t i) {
    auto cells = voxels_.data();
    if (!cells[i]) {
        cells[i] = 1;
        ++occupied_;
    }
}

void SausageRaster::add_segment(const Vec& a, const Vec& b) {
    if (rho_ > 0.0)
        stamp_capsule(a, b);
    else
        traverse(a, b);
}

// Row-interval stamping along axis 0. For each row (fixed indices on axes
// 1..d-1) the capsule meets the row in one interval: the hull of the two end
// balls and the cylinder section, which is itself an interval.
void SausageRaster::stamp_capsule(const Vec& a, const Vec& b) {
    const GridSpec& g = voxels_.grid();
    const int d = g.d;
    const int n = g.n;
    const double r2 = rho_ * rho_;
    const Vec u = b - a;
    const double L2 = u.squaredNorm();

    IVec first(d), last(d);
    for (int k = 0; k < d; ++k) {
        const double lo = std::min(a[k], b[k]) - rho_;
        const double hi = std::max(a[k], b[k]) + rho_;
        first[k] = static_cast<int>(std::ceil((lo - g.offset[k]) * n));
        last[k] = static_cast<int>(std::floor((hi - g.offset[k]) * n));
        if (last[k] < first[k]) return;
    }

    IVec idx = first;
    auto cells = voxels_.data();
    while (true) {
        // Geometry of this row relative to a, axes >= 1.
        double c1a = 0.0, c1b = 0.0, c2 = 0.0;
        for (int k = 1; k < d; ++k) {
            const double y = g.offset[k] + static_cast<double>(idx[k]) / n;
            const double da = y - a[k];
            const double db = y - b[k];
            c1a += da * da;
            c1b += db * db;
            c2 += da * u[k];
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        auto hull = [&](double l, double h) {
            if (l > h) return;
            lo = std::min(lo, l);
            hi = std::max(hi, h);
        };
        if (c1a <= r2) {
            const double w = std::sqrt(r2 - c1a);
            hull(a[0] - w, a[0] + w);
        }
        if (c1b <= r2) {
            const double w = std::sqrt(r2 - c1b);
            hull(b[0] - w, b[0] + w);
        }
        if (L2 > 0.0) {
            // X = x0 - a0; projection parameter s = (X u0 + c2) / L2 in [0, 1];
            // squared distance to the line is A X^2 + B X + C.
            const double u0 = u[0];
            double sl = -std::numeric_limits<double>::infinity();
            double sh = std::numeric_limits<double>::infinity();
            bool ok = true;
            if (u0 > 0.0) {
                sl = -c2 / u0;
                sh = (L2 - c2) / u0;
            } else if (u0 < 0.0) {
                sl = (L2 - c2) / u0;
                sh = -c2 / u0;
            } else {
                ok = c2 >= 0.0 && c2 <= L2;
            }
            if (ok) {
                const double A = 1.0 - u0 * u0 / L2;
                const double B = -2.0 * u0 * c2 / L2;
                const double C = c1a - c2 * c2 / L2;
                double ql, qh;
                if (A > 1e-12) {
                    const double disc = B * B - 4.0 * A * (C - r2);
                    if (disc >= 0.0) {
                        const double sq = std::sqrt(disc);
                        ql = (-B - sq) / (2.0 * A);
                        qh = (-B + sq) / (2.0 * A);
                        hull(a[0] + std::max(sl, ql), a[0] + std::min(sh, qh));
                    }
                } else if (C <= r2) {
                    hull(a[0] + sl, a[0] + sh);
                }
            }
        }
        if (lo <= hi) {
            const long long i0 = static_cast<long long>(std::ceil((lo - g.offset[0]) * n));
            const long long i1 = static_cast<long long>(std::floor((hi - g.offset[0]) * n));
            if (i1 >= i0) {
                std::size_t base = 0;
                for (int k = 1; k < d; ++k)
                    base += static_cast<std::size_t>(wrap_index(idx[k], n)) * voxels_.stride(k);
                const long long count = std::min<long long>(i1 - i0 + 1, n);
                int j = wrap_index(i0, n);
                for (long long c = 0; c < count; ++c) {
                    const std::size_t cell = base + static_cast<std::size_t>(j);
                    if (!cells[cell]) {
                        cells[cell] = 1;
                        ++occupied_;
                    }
                    if (++j == n) j = 0;
                }
            }
        }
        int k = 1;
        while (k < d && idx[k] == last[k]) {
            idx[k] = first[k];
            ++k;
        }
        if (k >= d) break;
        ++idx[k];
    }
}

// Amanatides-Woo traversal in grid units, where cell i spans [i, i+1).
void SausageRaster::traverse(const Vec& a, const Vec& b) {
    const GridSpec& g = voxels_.grid();
    const int d = g.d;
    const int n = g.n;
    Vec ga(d), dir(d);
    IVec cell(d), step(d);
    Vec tmax(d), tdelta(d);
    const double inf = std::numeric_limits<double>::infinity();
    for (int k = 0; k < d; ++k) {
        ga[k] = (a[k] - g.offset[k]) * n + 0.5;
        dir[k] = (b[k] - a[k]) * n;
        const double f = std::floor(ga[k]);
        cell[k] = static_cast<int>(f);
        if (dir[k] > 0.0) {
            step[k] = 1;
            tmax[k] = (f + 1.0 - ga[k]) / dir[k];
            tdelta[k] = 1.0 / dir[k];
        } else if (dir[k] < 0.0) {
            step[k] = -1;
            tmax[k] = (ga[k] - f) / -dir[k];
            tdelta[k] = -1.0 / dir[k];
        } else {
            step[k] = 0;
            tmax[k] = inf;
            tdelta[k] = inf;
        }
    }
    auto mark_cell = [&] {
        std::size_t i = 0;
        for (int k = 0; k < d; ++k)
            i += static_cast<std::size_t>(wrap_index(cell[k], n)) * voxels_.stride(k);
        mark(i);
    };
    mark_cell();
    while (true) {
        int k = 0;
        for (int j = 1; j < d; ++j)
            if (tmax[j] < tmax[k]) k = j;
        if (tmax[k] > 1.0) break;
        cell[k] += step[k];
        tmax[k] += tdelta[k];
        mark_cell();
    }
}

SausageRasterResult rasterize_sausage(const BrownianPath& path, double rho, const GridSpec& grid) {
    if (path.d != grid.d) throw std::invalid_argument("sausage: path and grid dimensions differ");
    SausageRaster raster(grid, rho);
    if (path.size() > 0) raster.add_point(path.point(0));
    for (std::size_t i = 1; i < path.size(); ++i) raster.add_segment(path.point(i - 1), path.point(i));
    return {std::move(raster.voxels()), raster.coarse()};
}

void sweep_sausage(const SimConfig& cfg, double rho, const std::vector<double>& times,
                   const std::function<void(double, const SausageRaster&)>& fn) {
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("sweep: times must be ascending");
    PathWalker walker(cfg);
    SausageRaster raster(cfg.grid, rho);
    raster.add_point(cfg.start);
    for (double t : times) {
        walker.advance_to(t, [&](double, const Vec& a, double, const Vec& b) { raster.add_segment(a, b); });
        fn(std::min(t, cfg.t_max), raster);
    }
}

ExcursionCounter::ExcursionCounter(const TorusPoint& x, double r, double R) : x_(x), r_(r), R_(R) {
    if (!(r > 0.0 && r < R && R < 0.5)) throw std::invalid_argument("excursions: need 0 < r < R < 1/2");
}

void ExcursionCounter::feed(double t0, const Vec& a, double t1, const Vec& b) {
    observed_ = std::max(observed_, t1);
    const Vec u = b - a;
    const Vec c = nearest_image(x_.coords(), 0.5 * (a + b));
    const Vec p = a - c;
    auto time_at = [&](double s) { return t0 + s * (t1 - t0); };
    double s = 0.0;
    while (true) {
        if (phase_ == Phase::WaitOuterFirst) {
            const auto hit = first_crossing(p, u, R_, s);
            if (!hit) return;
            s = *hit;
            t0_ = time_at(s);
            last_outer_ = *t0_;
            phase_ = Phase::WaitInner;
        } else if (phase_ == Phase::WaitInner) {
            const auto hit = first_crossing(p, u, r_, s);
            if (!hit) return;
            s = *hit;
            pending_t_prime_ = time_at(s);
            pending_xi_prime_ = wrap_coords(a + s * u);
            phase_ = Phase::WaitOuter;
        } else {
            const auto hit = first_crossing(p, u, R_, s);
            if (!hit) return;
            s = *hit;
            ExcursionRecord rec;
            rec.index = static_cast<int>(records_.size()) + 1;
            rec.t_prime = pending_t_prime_;
            rec.t = time_at(s);
            rec.xi_prime = pending_xi_prime_;
            rec.xi = wrap_coords(a + s * u);
            rec.tau = rec.t - last_outer_;
            rec.tau_prime = rec.t_prime - last_outer_;
            records_.push_back(rec);
            last_outer_ = rec.t;
            phase_ = Phase::WaitInner;
        }
    }
}

ExcursionCount ExcursionCounter::result(double t) const {
    if (t > observed_ + 1e-12) throw std::invalid_argument("excursions: time beyond observed path");
    ExcursionCount out;
    out.t0 = t0_;
    if (!t0_ || *t0_ > t) return out;
    for (const auto& rec : records_) {
        if (rec.t > t) break;
        out.records.push_back(rec);
    }
    out.n = out.records.size();

    // S'_j = T_0 + sum_{i<=j} tau'_i; N' = max{j : S'_j <= t}.
    double clock = *t0_;
    std::size_t j = 0;
    for (const auto& rec : records_) {
        clock += rec.tau_prime;
        if (clock > t) return out.n_prime = j, out;
        ++j;
    }
    if (phase_ == Phase::WaitOuter) {
        clock += pending_t_prime_ - last_outer_;
        if (clock > t) return out.n_prime = j, out;
        ++j;
        // The next inner hit needs the next outer hit, which is unobserved.
        out.n_prime = j;
        out.n_prime_determined = false;
        return out;
    }
    out.n_prime = j;
    // Waiting for the next inner hit: it comes after observed_, so the next
    // partial sum exceeds clock + (observed_ - last_outer_).
    out.n_prime_determined = clock + (observed_ - last_outer_) > t;
    return out;
}

ExcursionCount count_excursions(const BrownianPath& path, const TorusPoint& x, double r, double R) {
    ExcursionCounter counter(x, r, R);
    if (path.size() == 0) return counter.result(0.0);
    counter.feed(path.times[0], path.point(0), path.times[0], path.point(0));
    for (std::size_t i = 1; i < path.size(); ++i)
        counter.feed(path.times[i - 1], path.point(i - 1), path.times[i], path.point(i));
    return counter.result(path.horizon());
}

InradiusResult inradius(const VoxelSet& sausage, int threads) {
    if (sausage.empty()) throw DegenerateInput("inradius: empty sausage");
    InradiusResult out;
    out.uncertainty = 2.0 * sausage.grid().half_diagonal();
    const auto sq = squared_distance_transform(sausage, threads);
    std::int32_t best = 0;
    for (std::size_t i = 0; i < sq.size(); ++i)
        if (!sausage.test(i)) best = std::max(best, sq[i]);
    out.value = std::sqrt(static_cast<double>(best)) * sausage.grid().cell();
    return out;
}

namespace {

// Uncovered cell centres bucketed on a coarse periodic grid, for replay.
class CellBuckets {
  public:
    CellBuckets(const GridSpec& grid, int nb, const std::vector<std::size_t>& cells,
                const VoxelSet& shape_of)
        : grid_(grid), nb_(nb), d_(grid.d) {
        std::size_t total = 1;
        for (int k = 0; k < d_; ++k) total *= static_cast<std::size_t>(nb_);
        buckets_.resize(total);
        for (std::size_t c : cells) {
            const Vec x = grid_.centre(shape_of.coords(c));
            buckets_[bucket_of(x)].push_back(x);
            ++size_;
        }
    }

    std::size_t size() const { return size_; }

    // Calls fn(x) for every stored point whose bucket meets [lo, hi]
    // (unwrapped); fn returns true to remove the point.
    template <class Fn>
    void visit(const Vec& lo, const Vec& hi, Fn&& fn) {
        IVec first(d_), count(d_);
        for (int k = 0; k < d_; ++k) {
            const long long b0 = static_cast<long long>(std::floor(lo[k] * nb_));
            const long long b1 = static_cast<long long>(std::floor(hi[k] * nb_));
            first[k] = static_cast<int>(b0);
            count[k] = static_cast<int>(std::min<long long>(b1 - b0 + 1, nb_));
        }
        IVec off = IVec::Zero(d_);
        while (true) {
            std::size_t b = 0, stride = 1;
            for (int k = 0; k < d_; ++k) {
                b += static_cast<std::size_t>(wrap_index(first[k] + off[k], nb_)) * stride;
                stride *= static_cast<std::size_t>(nb_);
            }
            auto& vec = buckets_[b];
            for (std::size_t i = 0; i < vec.size();) {
                if (fn(vec[i])) {
                    vec[i] = vec.back();
                    vec.pop_back();
                    --size_;
                } else {
                    ++i;
                }
            }
            int k = 0;
            while (k < d_ && off[k] + 1 == count[k]) off[k++] = 0;
            if (k == d_) break;
            ++off[k];
        }
    }

  private:
    std::size_t bucket_of(const Vec& x) const {
        std::size_t b = 0, stride = 1;
        for (int k = 0; k < d_; ++k) {
            const double w = x[k] - std::floor(x[k]);
            b += static_cast<std::size_t>(std::min(nb_ - 1, static_cast<int>(w * nb_))) * stride;
            stride *= static_cast<std::size_t>(nb_);
        }
        return b;
    }

    GridSpec grid_;
    int nb_;
    int d_;
    std::vector<std::vector<Vec>> buckets_;
    std::size_t size_ = 0;
};

}  // namespace

CoverResult cover_time(const SimConfig& cfg, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("cover time: need 0 < eps < 1");
    cfg.validate();
    const int d = cfg.d;
    if (eps >= std::sqrt(static_cast<double>(d)) / 2.0) return {0.0, true};
    if (cfg.dt > eps * eps / 16.0 * (1.0 + 1e-12))
        throw ConfigError("cover time: dt must be at most eps^2/16");

    const GridSpec& g = cfg.grid;
    const double hd = g.half_diagonal();
    const double cell = g.cell();

    // Forward pass: radius-0 raster and distance-transform checkpoints.
    PathWalker walker(cfg);
    SausageRaster raster(g, 0.0);
    raster.add_point(cfg.start);
    auto stamp = [&](double, const Vec& a, double, const Vec& b) { raster.add_segment(a, b); };

    // Every path point lies in an occupied cell, so for a cell centre c,
    // EDT(c) - hd <= dist(c, path) <= EDT(c) + hd. A checkpoint with some
    // EDT - hd > eps is a strict lower bound on the cover time; the cells in
    // doubt there (EDT + hd > eps) contain the last one to be covered.
    std::vector<std::size_t> doubtful;
    bool all_doubtful = true;
    double t_check = std::min(cfg.t_max, std::max(cfg.dt, psi_d(eps, Dim(d)) / 2.0));
    double certified = -1.0;
    while (true) {
        walker.advance_to(t_check, stamp);
        const auto sq = squared_distance_transform(raster.voxels());
        std::int32_t worst = 0;
        for (auto v : sq) worst = std::max(worst, v);
        const double far = std::sqrt(static_cast<double>(worst)) * cell;
        if (far + hd <= eps) {
            certified = t_check;
            break;
        }
        if (far - hd > eps) {
            doubtful.clear();
            all_doubtful = false;
            for (std::size_t i = 0; i < sq.size(); ++i)
                if (std::sqrt(static_cast<double>(sq[i])) * cell + hd > eps) doubtful.push_back(i);
        }
        if (t_check >= cfg.t_max) break;
        t_check = std::min(cfg.t_max, t_check * 1.25);
    }
    const double replay_until = certified >= 0.0 ? certified : cfg.t_max;
    if (all_doubtful) {
        doubtful.resize(g.cell_count());
        for (std::size_t i = 0; i < doubtful.size(); ++i) doubtful[i] = i;
    }

    // Replay: exact entry time of every doubtful cell centre into the eps-sausage.
    const int nb = std::clamp(static_cast<int>(std::floor(1.0 / (2.0 * eps))), 1, 128);
    CellBuckets buckets(g, nb, doubtful, raster.voxels());
    doubtful.clear();
    doubtful.shrink_to_fit();
    double last_entry = 0.0;
    const double e2 = eps * eps;
    auto check = [&](double t0, const Vec& a, double t1, const Vec& b) {
        if (buckets.size() == 0) return;
        const Vec u = b - a;
        const Vec lo = a.cwiseMin(b).array() - eps;
        const Vec hi = a.cwiseMax(b).array() + eps;
        buckets.visit(lo, hi, [&](const Vec& x) {
            const Vec p = min_image(a - x);  // a relative to the centre
            if (dist_point_segment(Vec::Zero(d), p, p + u) > eps) return false;
            double s = 0.0;
            if (p.squaredNorm() > e2) s = first_crossing(p, u, eps, 0.0).value_or(0.0);
            last_entry = std::max(last_entry, t0 + s * (t1 - t0));
            return true;
        });
    };
    PathWalker replay(cfg);
    check(0.0, cfg.start, 0.0, cfg.start);
    while (buckets.size() > 0 && !replay.done() && replay.state().time < replay_until) {
        Vec a, b;
        double t0, t1;
        replay.step(a, b, t0, t1);
        check(t0, a, t1, b);
    }
    if (buckets.size() > 0) return {cfg.t_max, false};
    return {last_entry, true};
}

double LocalLimitResult::standard_error() const {
    if (probes == 0) return 0.0;
    const double p = probability();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(probes));
}

LocalLimitResult local_limit_experiment(const SimConfig& cfg, const ShapeSpec& shape,
                                        std::size_t probes) {
    cfg.validate();
    LocalLimitResult out;
    out.probes = probes;
    out.unhit = probes;
    if (shape.empty() || probes == 0) return out;
    if (shape.dim() != cfg.d) throw std::invalid_argument("local limit: shape dimension differs from d");
    if (!(cfg.t_max > 1.0)) throw std::invalid_argument("local limit: need t > 1");
    const int d = cfg.d;
    const double s = phi_local(cfg.t_max, Dim(d));
    Vec lo, hi;
    shape.bounds(lo, hi);
    lo *= s;
    hi *= s;
    if ((hi - lo).maxCoeff() >= 0.5) throw std::invalid_argument("local limit: scaled shape too large");

    CounterRng rng(cfg.seed, Stream::Probes);
    const int nb = std::clamp(static_cast<int>(std::floor(1.0 / std::max((hi - lo).maxCoeff(), 1e-3))), 1, 64);
    std::vector<std::vector<Vec>> bucket(static_cast<std::size_t>(std::pow(nb, d)));
    std::size_t remaining = probes;
    for (std::size_t j = 0; j < probes; ++j) {
        Vec x(d);
        for (int k = 0; k < d; ++k) x[k] = rng.uniform();
        std::size_t b = 0, stride = 1;
        for (int k = 0; k < d; ++k) {
            b += static_cast<std::size_t>(std::min(nb - 1, static_cast<int>(x[k] * nb))) * stride;
            stride *= static_cast<std::size_t>(nb);
        }
        bucket[b].push_back(x);
    }

    auto check = [&](const Vec& a, const Vec& b) {
        // Probes X with (X + sE) meeting [a, b]: X in [min - s hi, max - s lo].
        const Vec qlo = a.cwiseMin(b) - hi;
        const Vec qhi = a.cwiseMax(b) - lo;
        IVec first(d), count(d);
        for (int k = 0; k < d; ++k) {
            const long long b0 = static_cast<long long>(std::floor(qlo[k] * nb));
            const long long b1 = static_cast<long long>(std::floor(qhi[k] * nb));
            first[k] = static_cast<int>(b0);
            count[k] = static_cast<int>(std::min<long long>(b1 - b0 + 1, nb));
        }
        IVec off = IVec::Zero(d);
        const Vec u = b - a;
        while (true) {
            std::size_t bi = 0, stride = 1;
            for (int k = 0; k < d; ++k) {
                bi += static_cast<std::size_t>(wrap_index(first[k] + off[k], nb)) * stride;
                stride *= static_cast<std::size_t>(nb);
            }
            auto& vec = bucket[bi];
            for (std::size_t i = 0; i < vec.size();) {
                const Vec p = min_image(a - vec[i]);
                if (shape.distance_to_segment(p / s, (p + u) / s) <= 0.0) {
                    vec[i] = vec.back();
                    vec.pop_back();
                    --remaining;
                } else {
                    ++i;
                }
            }
            int k = 0;
            while (k < d && off[k] + 1 == count[k]) off[k++] = 0;
            if (k == d) break;
            ++off[k];
        }
    };

    PathWalker walker(cfg);
    check(cfg.start, cfg.start);
    Vec a, b;
    double t0, t1;
    while (remaining > 0 && walker.step(a, b, t0, t1)) check(a, b);
    out.unhit = remaining;
    return out;
}

LocalLimitResult pool(const std::vector<LocalLimitResult>& parts) {
    LocalLimitResult out;
    for (const auto& p : parts) {
        out.probes += p.probes;
        out.unhit += p.unhit;
    }
    return out;
}

}  // namespace vacant
