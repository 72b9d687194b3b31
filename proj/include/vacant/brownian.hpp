#pragma once

// Brownian motion on the unit torus, Wiener-sausage rasters, excursion
// counting between concentric spheres, and the inradius / cover-time
// observables built on them.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vacant/ldpmath.hpp"
#include "vacant/rng.hpp"
#include "vacant/shape.hpp"
#include "vacant/torus.hpp"

namespace vacant {

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct SimConfig {
    int d = 3;
    double t_max = 0.0;
    double dt = 0.0;
    double rho = 0.0;
    std::uint64_t seed = 0;
    GridSpec grid = GridSpec::centred(3, 64);
    Vec start = Vec::Zero(3);

    /// Config with dt at its anti-tunneling bound and the path started at 0.
    static SimConfig make(Dim d, double t_max, double rho, int n, std::uint64_t seed);

    /// rho^2/16 for rho > 0, otherwise (1/n)^2/16.
    double max_dt() const;
    std::uint64_t steps() const;
    void validate() const;
};

/// Sampled path; positions are unwrapped (in R^d), one column per sample.
struct BrownianPath {
    int d = 3;
    std::vector<double> times;
    Eigen::MatrixXd positions;

    std::size_t size() const { return times.size(); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    Vec point(std::size_t i) const { return positions.col(static_cast<Eigen::Index>(i)); }
    TorusPoint wrapped(std::size_t i) const { return TorusPoint(point(i)); }

    /// Polyline through the given points at the given times (test fixtures).
    static BrownianPath from_points(const std::vector<double>& times, const std::vector<Vec>& pts);
};

/// Streaming generator for the path of a SimConfig. Step k uses the normals
/// at a fixed block of the (seed, Path) stream, so any stretch of the path
/// can be replayed from a saved state.
class PathWalker {
  public:
    struct State {
        std::uint64_t step = 0;
        double time = 0.0;
        Vec position;
    };

    explicit PathWalker(const SimConfig& cfg);

    const State& state() const { return state_; }
    void restore(const State& s) { state_ = s; }
    bool done() const { return state_.step >= total_steps_; }
    std::uint64_t total_steps() const { return total_steps_; }

    /// One step; returns false once t_max is reached.
    bool step(Vec& from, Vec& to, double& t0, double& t1);

    /// Advance to min(t_end, t_max), calling fn(t0, a, t1, b) per segment.
    template <class Fn>
    void advance_to(double t_end, Fn&& fn) {
        Vec a, b;
        double t0, t1;
        while (!done() && state_.time < t_end) {
            step(a, b, t0, t1);
            fn(t0, a, t1, b);
        }
    }

  private:
    SimConfig cfg_;
    CounterRng rng_;
    std::uint64_t total_steps_;
    std::uint64_t blocks_per_step_;
    State state_;
};

/// Materializes the whole path (for modest step counts only).
BrownianPath simulate_path(const SimConfig& cfg);

/// Incremental raster of a sausage W_rho: a cell is occupied iff its centre
/// lies within rho of some segment (capsule stamping). With rho = 0 the cells
/// crossed by the polyline are marked instead.
class SausageRaster {
  public:
    SausageRaster(const GridSpec& grid, double rho);

    void add_point(const Vec& p) { add_segment(p, p); }
    void add_segment(const Vec& a, const Vec& b);

    const VoxelSet& voxels() const { return voxels_; }
    VoxelSet& voxels() { return voxels_; }
    std::size_t occupied() const { return occupied_; }
    double rho() const { return rho_; }
    /// True when the cell side exceeds rho/2 for rho > 0.
    bool coarse() const { return coarse_; }

  private:
    void mark(std::size_t i);
    void stamp_capsule(const Vec& a, const Vec& b);
    void traverse(const Vec& a, const Vec& b);

    VoxelSet voxels_;
    double rho_;
    bool coarse_;
    std::size_t occupied_ = 0;
};

struct SausageRasterResult {
    VoxelSet voxels;
    bool coarse_grid_warning = false;
};

SausageRasterResult rasterize_sausage(const BrownianPath& path, double rho, const GridSpec& grid);

/// Streams the path of cfg through a raster of radius rho and calls
/// fn(t, raster) at each requested time (ascending; times past t_max are
/// reported at t_max).
void sweep_sausage(const SimConfig& cfg, double rho, const std::vector<double>& times,
                   const std::function<void(double, const SausageRaster&)>& fn);

struct ExcursionRecord {
    int index = 0;
    double t_prime = 0.0;  // T'_i, hitting time of the inner sphere
    double t = 0.0;        // T_i, subsequent hitting time of the outer sphere
    Vec xi_prime;          // W(T'_i), wrapped
    Vec xi;                // W(T_i), wrapped
    double tau = 0.0;        // T_i - T_{i-1}
    double tau_prime = 0.0;  // T'_i - T_{i-1}
};

struct ExcursionCount {
    std::size_t n = 0;        // completed excursions by time t
    std::size_t n_prime = 0;  // excursions when the non-excursion clock reaches t
    /// False when the observed horizon is too short to pin n_prime down; the
    /// value is then a lower bound.
    bool n_prime_determined = true;
    std::optional<double> t0;  // T_0, first hit of the outer sphere
    std::vector<ExcursionRecord> records;
};

/// Streaming excursion counter for the spheres of radii r < R about x.
/// Crossings are located exactly on each straight segment of the polyline.
/// Travel from the inner to the outer sphere before T_0 is not counted.
class ExcursionCounter {
  public:
    ExcursionCounter(const TorusPoint& x, double r, double R);

    void feed(double t0, const Vec& a, double t1, const Vec& b);
    /// Counts at time t, which must not exceed the last fed time.
    ExcursionCount result(double t) const;
    double observed_until() const { return observed_; }

  private:
    enum class Phase { WaitOuterFirst, WaitInner, WaitOuter };

    TorusPoint x_;
    double r_, R_;
    Phase phase_ = Phase::WaitOuterFirst;
    std::optional<double> t0_;
    double pending_t_prime_ = 0.0;
    Vec pending_xi_prime_;
    double last_outer_ = 0.0;
    double observed_ = 0.0;
    std::vector<ExcursionRecord> records_;
};

/// (N, N', records) for 0 < r < R < 1/2 over the whole path horizon.
ExcursionCount count_excursions(const BrownianPath& path, const TorusPoint& x, double r, double R);

class DegenerateInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct InradiusResult {
    double value = 0.0;
    /// One cell diagonal: half for sampling the sup at cell centres, half for
    /// the traversal raster standing in for the path.
    double uncertainty = 0.0;
};

/// Largest distance from a vacant cell centre to the nearest occupied centre.
InradiusResult inradius(const VoxelSet& sausage, int threads = 1);

struct CoverResult {
    double time = 0.0;
    bool covered = false;  // false: horizon exhausted, time is a lower bound
};

/// First time every grid cell centre is within eps of the path polyline.
/// Requires cfg.dt <= eps^2/16. The path is rastered (radius 0) and the
/// distance transform checked on the schedule t_k = t_0 1.25^k; once a
/// checkpoint certifies coverage the path is replayed against the cells in
/// doubt at the last checkpoint known to precede coverage, and the entry time
/// of the last one is solved exactly on its segment.
CoverResult cover_time(const SimConfig& cfg, double eps);

struct LocalLimitResult {
    std::size_t probes = 0;
    std::size_t unhit = 0;
    double probability() const { return probes ? static_cast<double>(unhit) / probes : 1.0; }
    double standard_error() const;
};

/// Fraction of uniform probe points X with (X + t^{-1/(d-2)} E) disjoint from
/// W[0, t_max], on a single path. Probes come from the (seed, Probes) stream.
LocalLimitResult local_limit_experiment(const SimConfig& cfg, const ShapeSpec& shape,
                                        std::size_t probes);

/// Binomial pooling of several per-path results.
LocalLimitResult pool(const std::vector<LocalLimitResult>& parts);

}  // namespace vacant
