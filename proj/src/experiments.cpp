#include "vacant/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "vacant/animals.hpp"
#include "vacant/brownian.hpp"
#include "vacant/capacity.hpp"
#include "vacant/census.hpp"
#include "vacant/ldpmath.hpp"
#include "vacant/spectra.hpp"

#ifndef VACANT_VERSION
#define VACANT_VERSION "unknown"
#endif

namespace vacant {

namespace {

using Keys = std::vector<std::pair<std::string, std::string>>;

// Rough single-core costs, measured on the reference machine.
constexpr double kSecondsPerStep = 2.5e-7;          // path step with a radius-0 raster
constexpr double kSecondsPerBareStep = 1.4e-7;      // path step feeding a counter only
constexpr double kSecondsPerCapsuleCell = 2.0e-9;   // cell visited while stamping a capsule
constexpr double kSecondsPerEdtCell = 6.0e-8;       // distance transform, per cell
constexpr double kSecondsPerWalker = 2.0e-5;        // one walk-on-spheres walker
constexpr double kSecondsPerProbeStep = 5.0e-9;     // probe bucket check, per step and probe

const std::map<std::string, Keys>& key_table() {
    static const std::map<std::string, Keys> table{
        {"inradius-vs-t",
         {{"d", "3"}, {"n", "128"}, {"t", "20,50,100"}, {"seed", "1"}, {"seeds", "10"}, {"rho", "0"}, {"dt", "auto"}}},
        {"cover-time",
         {{"d", "3"}, {"n", "96"}, {"eps", "0.05"}, {"seed", "1"}, {"seeds", "10"}, {"t_max", "auto"}}},
        {"census",
         {{"d", "3"},
          {"n", "128"},
          {"t", "20"},
          {"seed", "1"},
          {"seeds", "1"},
          {"rho", "default"},
          {"capacity", "kappa-star"},
          {"walkers", "4000"},
          {"volume_floor", "10"},
          {"eigen_count", "1"},
          {"eigen_tol", "1e-6"},
          {"chi_kappa", "0"},
          {"components", "1"}}},
        {"capacity-validate",
         {{"shape", "ball"},
          {"d", "3"},
          {"radius", "1"},
          {"side", "1"},
          {"separation", "20"},
          {"scale", "1"},
          {"enclose", "2"},
          {"method", "wos,energy"},
          {"walkers", "100000"},
          {"energy_points", "2000"},
          {"seed", "1"},
          {"seeds", "1"}}},
        {"excursion-validate",
         {{"d", "3"},
          {"r", "0.02"},
          {"R", "0.1"},
          {"target", "50"},
          {"centre", "auto"},
          {"dt", "auto"},
          {"seed", "1"},
          {"seeds", "20"}}},
        {"local-limit",
         {{"d", "3"}, {"t", "50"}, {"radius", "0.4"}, {"n", "256"}, {"probes", "1000"}, {"seed", "1"}, {"seeds", "20"}}},
        {"animal-count", {{"d", "2"}, {"Q", "6"}, {"animal_budget", "50000000"}, {"write_animals", "0"}}},
        {"translate-pack",
         {{"d", "3"},
          {"n", "128"},
          {"t", "20"},
          {"seed", "1"},
          {"seeds", "1"},
          {"rho", "default"},
          {"radius", "0.5"},
          {"scale", "1"}}},
        {"predict", {{"observable", "capacity"}, {"d", "3"}, {"values", "1,2"}, {"units", "absolute"}}},
    };
    return table;
}

// Config with every default filled in; unknown keys are an error.
KeyValueConfig resolve(const std::string& name, const KeyValueConfig& cfg) {
    const auto it = key_table().find(name);
    if (it == key_table().end()) throw ConfigError("unknown experiment '" + name + "'");
    std::set<std::string> known;
    for (const auto& [k, v] : it->second) known.insert(k);
    cfg.check_known(known);
    KeyValueConfig out = cfg;
    for (const auto& [k, v] : it->second)
        if (!out.has(k)) out.set(k, v);
    return out;
}

int dim_of(const KeyValueConfig& c, int lowest = 3) {
    const long long d = c.integer("d", 3);
    if (d < lowest || d > kMaxDim) throw ConfigError("d must lie in [" + std::to_string(lowest) + ", 8]");
    return static_cast<int>(d);
}

int grid_of(const KeyValueConfig& c, int d) {
    const long long n = c.integer("n", 0);
    if (n < 2) throw ConfigError("n must be at least 2");
    if (std::pow(static_cast<double>(n), d) >= 2147483648.0) throw ConfigError("n^d must stay below 2^31 cells");
    return static_cast<int>(n);
}

std::vector<std::uint64_t> seeds_of(const KeyValueConfig& c) {
    const long long first = c.integer("seed", 1);
    const long long count = c.integer("seeds", 1);
    if (first < 0) throw ConfigError("seed must be >= 0");
    if (count < 1) throw ConfigError("seeds must be at least 1");
    std::vector<std::uint64_t> out;
    for (long long i = 0; i < count; ++i) out.push_back(static_cast<std::uint64_t>(first + i));
    return out;
}

std::vector<double> ascending(const KeyValueConfig& c, const std::string& key, double above) {
    std::vector<double> v = c.numbers(key, {});
    for (double x : v)
        if (!(x > above) || !std::isfinite(x))
            throw ConfigError("'" + key + "' entries must be finite and > " + format_number(above));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

double positive(const KeyValueConfig& c, const std::string& key) {
    const double v = c.number(key, 0.0);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("'" + key + "' must be positive");
    return v;
}

// rho at time t: "default" is the window midpoint, otherwise a fixed radius.
double rho_at(const KeyValueConfig& c, double t, int d) {
    const std::string rule = c.text("rho", "0");
    if (rule == "default") return default_rho(t, Dim(d));
    const double r = c.number("rho", 0.0);
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("rho must be 'default' or a number >= 0");
    return r;
}

void check_resolution(int n, double t, int d) {
    const double phi = phi_d(t, Dim(d));
    if (1.0 / n >= phi)
        throw ConfigError("grid too coarse: 1/n = " + format_number(1.0 / n) + " must be below phi_d(t) = " +
                          format_number(phi) + " at t = " + format_number(t));
}

SimConfig sim_config(const KeyValueConfig& c, int d, double t_max, double rho, int n, std::uint64_t seed) {
    SimConfig cfg = SimConfig::make(Dim(d), t_max, rho, n, seed);
    if (c.has("dt") && c.text("dt", "auto") != "auto") cfg.dt = c.number("dt", cfg.dt);
    cfg.validate();
    return cfg;
}

// Work for one path with a raster of radius rho on an n-grid.
double path_cost(const SimConfig& cfg) {
    const double steps = cfg.t_max / cfg.dt;
    double per_step = kSecondsPerStep;
    if (cfg.rho > 0.0) per_step += kSecondsPerCapsuleCell * std::pow(2.0 * cfg.rho * cfg.grid.n + 2.0, cfg.d);
    return steps * per_step;
}

double edt_cost(int n, int d) { return kSecondsPerEdtCell * std::pow(static_cast<double>(n), d); }

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json manifest_head(const std::string& name, const KeyValueConfig& c, const RunOptions& o, double estimate) {
    json m;
    m["experiment"] = name;
    m["version"] = VACANT_VERSION;
    m["created"] = utc_now();
    m["threads"] = o.threads;
    m["budget_seconds"] = o.budget;
    m["estimated_seconds"] = estimate;
    json cfg = json::object();
    for (const auto& [k, v] : c.values()) cfg[k] = v;
    m["config"] = cfg;
    m["runs"] = json::array();
    return m;
}

json sim_json(const SimConfig& cfg) {
    json j = cfg;
    j["steps"] = cfg.steps();
    return j;
}

// ---------------------------------------------------------------- costs

double cost_inradius(const KeyValueConfig& c) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const auto ts = ascending(c, "t", 1.0);
    for (double t : ts) check_resolution(n, t, d);
    const double rho = rho_at(c, ts.back(), d);
    const SimConfig cfg = sim_config(c, d, ts.back(), rho, n, 0);
    return static_cast<double>(seeds_of(c).size()) * (path_cost(cfg) + ts.size() * edt_cost(n, d));
}

double cover_dt(double eps, int n) { return std::min(eps * eps, 1.0 / (double(n) * n)) / 16.0; }

double cover_horizon(const KeyValueConfig& c, double eps, int d) {
    if (c.text("t_max", "auto") == "auto") return 10.0 * d * psi_d(eps, Dim(d));
    return positive(c, "t_max");
}

double cost_cover(const KeyValueConfig& c) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const auto eps = ascending(c, "eps", 0.0);
    double total = 0.0;
    for (double e : eps) {
        if (e >= 0.5) throw ConfigError("eps must be below 1/2");
        if (1.0 / n > e) throw ConfigError("grid spacing 1/n must not exceed eps");
        // the walk usually stops near d psi_d(eps)
        const double t = std::min(cover_horizon(c, e, d), 1.5 * d * psi_d(e, Dim(d)));
        const double checkpoints = std::log(t / (0.01 * t)) / std::log(1.25);
        // replay against the doubtful cells roughly doubles the path work
        total += 2.5 * (t / cover_dt(e, n) * kSecondsPerStep + checkpoints * edt_cost(n, d));
    }
    return total * static_cast<double>(seeds_of(c).size());
}

CensusOptions::Capacity capacity_mode(const KeyValueConfig& c) {
    const std::string m = c.text("capacity", "kappa-star");
    if (m == "none") return CensusOptions::Capacity::None;
    if (m == "all") return CensusOptions::Capacity::All;
    if (m == "kappa-star") return CensusOptions::Capacity::KappaStar;
    throw ConfigError("capacity must be none, all or kappa-star");
}

double cost_census(const KeyValueConfig& c) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const auto ts = ascending(c, "t", 1.0);
    capacity_mode(c);
    const double walkers = static_cast<double>(c.integer("walkers", 4000));
    if (walkers < 100) throw ConfigError("walkers must be at least 100");
    if (c.integer("volume_floor", 10) < 1) throw ConfigError("volume_floor must be at least 1");
    if (c.integer("eigen_count", 1) < 0) throw ConfigError("eigen_count must be >= 0");
    positive(c, "eigen_tol");
    c.numbers("chi_kappa", {});
    double total = 0.0;
    for (double t : ts) {
        check_resolution(n, t, d);
        const SimConfig cfg = sim_config(c, d, t, rho_at(c, t, d), n, 0);
        // a handful of measured components per run
        total += path_cost(cfg) + 3.0 * edt_cost(n, d) + 10.0 * walkers * kSecondsPerWalker;
    }
    return total * static_cast<double>(seeds_of(c).size());
}

double cost_capacity(const KeyValueConfig& c) {
    const int d = dim_of(c);
    const std::string shape = c.text("shape", "ball");
    if (shape != "ball" && shape != "cube" && shape != "two-ball")
        throw ConfigError("shape must be ball, cube or two-ball");
    positive(c, "radius");
    positive(c, "side");
    positive(c, "scale");
    if (!(c.number("enclose", 2.0) >= 1.0)) throw ConfigError("enclose must be at least 1");
    if (shape == "two-ball" && c.number("separation", 0.0) <= 2.0 * c.number("radius", 1.0))
        throw ConfigError("separation must exceed twice the radius");
    double total = 0.0;
    for (const auto& m : c.texts("method", {})) {
        if (m == "wos") {
            const double walkers = static_cast<double>(c.integer("walkers", 100000));
            if (walkers < 100) throw ConfigError("walkers must be at least 100");
            total += walkers * kSecondsPerWalker * static_cast<double>(seeds_of(c).size());
        } else if (m == "energy") {
            if (shape == "cube" && d != 3) throw ConfigError("energy method on the cube needs d = 3");
            if (d > 5) throw ConfigError("energy method needs d <= 5");
            const double pts = static_cast<double>(c.integer("energy_points", 2000));
            if (pts < 10 || pts > 20000) throw ConfigError("energy_points must lie in [10, 20000]");
            total += 1e-9 * pts * pts * pts;
        } else {
            throw ConfigError("method entries must be wos or energy");
        }
    }
    if (total == 0.0) throw ConfigError("method list is empty");
    return total;
}

double excursion_dt(const KeyValueConfig& c, double r) {
    if (c.text("dt", "auto") == "auto") return r * r / 64.0;
    const double dt = positive(c, "dt");
    if (dt > r * r / 16.0) throw ConfigError("dt must not exceed r^2/16");
    return dt;
}

double cost_excursion(const KeyValueConfig& c) {
    const int d = dim_of(c);
    const double r = positive(c, "r"), R = positive(c, "R");
    if (!(r < R && R < 0.5)) throw ConfigError("need 0 < r < R < 1/2");
    const double target = positive(c, "target");
    const double t = target / expected_excursions(1.0, r, R, Dim(d));
    if (c.text("centre", "auto") != "auto" && c.numbers("centre", {}).size() != static_cast<std::size_t>(d))
        throw ConfigError("centre needs d coordinates");
    return 1.3 * t / excursion_dt(c, r) * kSecondsPerBareStep * static_cast<double>(seeds_of(c).size());
}

double cost_local(const KeyValueConfig& c) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const double t = positive(c, "t");
    if (t <= 1.0) throw ConfigError("t must exceed 1");
    const double radius = positive(c, "radius");
    if (2.0 * radius * phi_local(t, Dim(d)) >= 0.5) throw ConfigError("scaled shape t^{-1/(d-2)} E must stay below 1/2");
    const long long probes = c.integer("probes", 1000);
    if (probes < 1) throw ConfigError("probes must be at least 1");
    const SimConfig cfg = sim_config(c, d, t, 0.0, n, 0);
    const double steps = cfg.t_max / cfg.dt;
    return static_cast<double>(seeds_of(c).size()) *
           (path_cost(cfg) + steps * kSecondsPerProbeStep * std::min<double>(probes, 64.0));
}

double cost_animals(const KeyValueConfig& c) {
    dim_of(c, 1);
    if (c.integer("Q", 6) < 1) throw ConfigError("Q must be at least 1");
    if (c.integer("animal_budget", 1) < 1) throw ConfigError("animal_budget must be at least 1");
    // the enumeration carries its own cap
    return 0.0;
}

double cost_translate(const KeyValueConfig& c) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const auto ts = ascending(c, "t", 1.0);
    positive(c, "radius");
    ascending(c, "scale", 0.0);
    double total = 0.0;
    for (double t : ts) {
        check_resolution(n, t, d);
        const SimConfig cfg = sim_config(c, d, t, rho_at(c, t, d), n, 0);
        total += path_cost(cfg) + edt_cost(n, d);
    }
    return total * static_cast<double>(seeds_of(c).size());
}

double cost_predict(const KeyValueConfig& c) {
    dim_of(c);
    static const std::set<std::string> known{"phi", "psi", "J", "I", "capacity", "volume", "eigenvalue", "inradius",
                                             "cover"};
    if (!known.count(c.text("observable", ""))) throw ConfigError("unknown observable '" + c.text("observable", "") + "'");
    const std::string u = c.text("units", "absolute");
    if (u != "absolute" && u != "unit-ball") throw ConfigError("units must be absolute or unit-ball");
    c.numbers("values", {});
    return 0.0;
}

// ---------------------------------------------------------------- runners

ExperimentResult run_inradius(const KeyValueConfig& c, const RunOptions& o, json m) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const auto ts = ascending(c, "t", 1.0);
    const auto seeds = seeds_of(c);
    const double rho = rho_at(c, ts.back(), d);
    std::vector<std::vector<InradiusResult>> res(seeds.size());
    parallel_for(seeds.size(), o.threads, [&](std::size_t j) {
        const SimConfig cfg = sim_config(c, d, ts.back(), rho, n, seeds[j]);
        sweep_sausage(cfg, rho, ts, [&](double, const SausageRaster& r) { res[j].push_back(inradius(r.voxels())); });
    });
    CsvTable tab({"t", "seed", "rho", "rho_in", "rho_in_uncertainty", "phi", "rho_in_over_phi", "reference"});
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double phi = phi_d(ts[i], Dim(d));
        for (std::size_t j = 0; j < seeds.size(); ++j) {
            const auto& r = res[j][i];
            tab.add_row({ts[i], seeds[j], rho, r.value, r.uncertainty, phi, r.value / phi, 1.0});
        }
    }
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        json run{{"seed", seeds[j]}, {"sim", sim_json(sim_config(c, d, ts.back(), rho, n, seeds[j]))}};
        json phis = json::array();
        for (double t : ts) phis.push_back(phi_d(t, Dim(d)));
        run["phi"] = phis;
        m["runs"].push_back(run);
    }
    ExperimentResult out{"inradius-vs-t", std::move(m), {}, {}};
    out.tables.emplace_back("inradius", std::move(tab));
    return out;
}

ExperimentResult run_cover(const KeyValueConfig& c, const RunOptions& o, json m) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const auto eps = ascending(c, "eps", 0.0);
    const auto seeds = seeds_of(c);
    struct Job {
        double eps;
        std::uint64_t seed;
        SimConfig cfg;
        CoverResult res;
    };
    std::vector<Job> jobs;
    for (double e : eps)
        for (auto s : seeds) {
            SimConfig cfg = SimConfig::make(Dim(d), cover_horizon(c, e, d), 0.0, n, s);
            cfg.dt = cover_dt(e, n);
            cfg.validate();
            jobs.push_back({e, s, cfg, {}});
        }
    parallel_for(jobs.size(), o.threads, [&](std::size_t j) { jobs[j].res = cover_time(jobs[j].cfg, jobs[j].eps); });
    CsvTable tab({"eps", "seed", "cover_time", "covered", "psi", "cover_over_psi", "reference"});
    for (const auto& j : jobs) {
        const double psi = psi_d(j.eps, Dim(d));
        tab.add_row({j.eps, j.seed, j.res.time, std::int64_t{j.res.covered}, psi, j.res.time / psi, double(d)});
        m["runs"].push_back(json{{"seed", j.seed}, {"eps", j.eps}, {"sim", sim_json(j.cfg)}, {"psi", psi}});
    }
    ExperimentResult out{"cover-time", std::move(m), {}, {}};
    out.tables.emplace_back("cover_time", std::move(tab));
    return out;
}

double nan_or(const std::optional<double>& v) { return v ? *v : std::numeric_limits<double>::quiet_NaN(); }

ExperimentResult run_census(const KeyValueConfig& c, const RunOptions& o, json m) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const double h = 1.0 / n;
    const auto ts = ascending(c, "t", 1.0);
    const auto seeds = seeds_of(c);
    const auto chi_kappa = c.numbers("chi_kappa", {});
    CensusOptions base;
    base.capacity = capacity_mode(c);
    base.walkers = static_cast<std::size_t>(c.integer("walkers", 4000));
    base.volume_floor = static_cast<std::size_t>(c.integer("volume_floor", 10));
    base.eigen_count = static_cast<int>(c.integer("eigen_count", 1));
    base.eigen_tol = c.number("eigen_tol", 1e-6);
    struct Job {
        double t, rho;
        std::uint64_t seed;
        SimConfig cfg;
        CensusReport report;
    };
    std::vector<Job> jobs;
    for (double t : ts)
        for (auto s : seeds) {
            const double rho = rho_at(c, t, d);
            jobs.push_back({t, rho, s, sim_config(c, d, t, rho, n, s), {}});
        }
    parallel_for(jobs.size(), o.threads, [&](std::size_t j) {
        Job& job = jobs[j];
        const SausageRasterResult raster = rasterize_sausage(simulate_path(job.cfg), job.rho, job.cfg.grid);
        CensusOptions opt = base;
        opt.seed = mix_seed(job.seed, static_cast<std::uint64_t>(std::llround(job.t * 1000.0)));
        job.report = measure(raster.voxels, opt);
    });

    std::vector<std::string> cols{"t",
                                  "seed",
                                  "rho",
                                  "phi",
                                  "components",
                                  "wrapping",
                                  "kappa_star",
                                  "kappa_star_norm",
                                  "kappa_reference",
                                  "max_volume",
                                  "volume_norm",
                                  "volume_reference",
                                  "max_diameter",
                                  "min_eigenvalue",
                                  "eigenvalue_norm",
                                  "eigenvalue_reference",
                                  "chain_violations"};
    for (double k : chi_kappa) cols.push_back("chi_" + format_number(k));
    CsvTable tab(cols);
    CsvTable comp({"t", "seed", "id", "voxels", "volume", "boundary_voxels", "shell_voxels", "inradius", "diameter",
                   "capacity", "capacity_stderr", "capacity_method", "eigenvalue", "wraps", "wrap_axes",
                   "capacity_chain_ok", "eigen_chain_ok"});
    const Dim dim(d);
    for (const auto& j : jobs) {
        const CensusReport& r = j.report;
        const double phi = phi_d(j.t, dim);
        std::int64_t wrapping = 0, violations = 0;
        for (const auto& rec : r.components) {
            wrapping += rec.wraps ? 1 : 0;
            IsoperimetricCheck iso;
            if (!rec.wraps) iso = isoperimetric_check(rec, d, h);
            violations += (iso.capacity_ok ? 0 : 1) + (iso.eigen_ok ? 0 : 1);
            if (c.integer("components", 1) == 0) continue;
            comp.add_row({j.t, j.seed, std::int64_t{rec.id}, std::uint64_t{rec.voxels}, rec.volume,
                          std::uint64_t{rec.boundary_voxels}, std::uint64_t{rec.shell_voxels}, rec.inradius,
                          rec.diameter, rec.capacity ? rec.capacity->value : std::nan(""),
                          rec.capacity ? rec.capacity->std_error : std::nan(""),
                          rec.capacity ? to_string(rec.capacity->method) : std::string("none"),
                          rec.eigen ? rec.eigen->lambda : std::nan(""), std::int64_t{rec.wraps},
                          std::int64_t{rec.wrap_axes}, std::int64_t{iso.capacity_ok}, std::int64_t{iso.eigen_ok}});
        }
        const double ks = nan_or(r.kappa_star);
        const double vmax = r.components.empty() ? std::nan("") : max_volume(r);
        const double dmax = r.components.empty() ? std::nan("") : max_diameter(r);
        const double lam = nan_or(min_eigenvalue(r));
        std::vector<CsvTable::Cell> row{j.t,
                                        j.seed,
                                        j.rho,
                                        phi,
                                        std::uint64_t{r.components.size()},
                                        wrapping,
                                        ks,
                                        ks / std::pow(phi, d - 2.0),
                                        kappa_d(dim),
                                        vmax,
                                        vmax / std::pow(phi, d),
                                        unit_ball_volume(dim),
                                        dmax,
                                        lam,
                                        lam * phi * phi,
                                        lambda_d(dim),
                                        violations};
        for (double k : chi_kappa) row.push_back(std::uint64_t{chi_counts(r, k, j.rho, phi)});
        tab.add_row(std::move(row));
        m["runs"].push_back(json{{"seed", j.seed},
                                 {"t", j.t},
                                 {"rho", j.rho},
                                 {"phi", phi},
                                 {"sim", sim_json(j.cfg)},
                                 {"kappa_star_censored", r.kappa_star_censored}});
    }
    ExperimentResult out{"census", std::move(m), {}, {}};
    out.tables.emplace_back("census", std::move(tab));
    out.tables.emplace_back("components", std::move(comp));
    return out;
}

SurfaceCloud sphere_cloud(int d, std::size_t points, double radius, const Vec& centre) {
    if (d == 3) return fibonacci_sphere(points, radius, centre);
    const int m = std::max(1, static_cast<int>(std::lround(std::pow(points / (2.0 * d), 1.0 / (d - 1)))));
    return cubed_sphere(d, m, radius, centre);
}

ExperimentResult run_capacity(const KeyValueConfig& c, const RunOptions& o, json m) {
    const int d = dim_of(c);
    const Dim dim(d);
    const std::string shape = c.text("shape", "ball");
    const double scale = c.number("scale", 1.0);
    const double radius = c.number("radius", 1.0) * scale;
    const double side = c.number("side", 1.0) * scale;
    const double sep = c.number("separation", 20.0) * scale;
    const auto seeds = seeds_of(c);
    const auto points = static_cast<std::size_t>(c.integer("energy_points", 2000));

    ShapeSpec E(d);
    double reference = std::nan("");
    std::string reference_kind = "exact";
    Vec off = Vec::Zero(d);
    off[0] = 0.5 * sep;
    if (shape == "ball") {
        E = ShapeSpec::ball(Vec::Zero(d), radius);
        reference = cap_ball(radius, dim).value;
    } else if (shape == "cube") {
        E = ShapeSpec::box(Vec::Constant(d, -0.5 * side), Vec::Constant(d, 0.5 * side));
        // Newtonian capacity of the unit cube, 0.6606785 in units of the unit ball
        if (d == 3) reference = 0.6606785 * kappa_d(dim) * side;
        reference_kind = "numerical";
    } else {
        E = ShapeSpec::ball(-off, radius).united(ShapeSpec::ball(off, radius));
        reference = 2.0 * cap_ball(radius, dim).value;
        reference_kind = "union-bound";
    }

    struct Job {
        std::string method;
        std::uint64_t seed;
        CapacityEstimate est;
    };
    std::vector<Job> jobs;
    for (const auto& meth : c.texts("method", {})) {
        if (meth == "wos")
            for (auto s : seeds) jobs.push_back({meth, s, {}});
        else
            jobs.push_back({meth, seeds.front(), {}});
    }
    WosParams wp;
    wp.walkers = static_cast<std::size_t>(c.integer("walkers", 100000));
    wp.enclose_radius = c.number("enclose", 2.0) * E.bounding_radius();
    parallel_for(jobs.size(), o.threads, [&](std::size_t i) {
        Job& j = jobs[i];
        if (j.method == "wos") {
            j.est = cap_wos(E, wp, j.seed);
            return;
        }
        // error bar: change against the cloud with half the points
        std::function<SurfaceCloud(std::size_t)> cloud_at;
        if (shape == "ball") {
            cloud_at = [&](std::size_t p) { return sphere_cloud(d, p, radius, Vec::Zero(d)); };
        } else if (shape == "cube") {
            cloud_at = [&](std::size_t p) {
                return cube_surface(std::max(1, static_cast<int>(std::lround(std::sqrt(p / 6.0)))), side, Vec::Zero(3));
            };
        } else {
            cloud_at = [&](std::size_t p) {
                SurfaceCloud cl = sphere_cloud(d, p / 2, radius, -off);
                return cl.append(sphere_cloud(d, p / 2, radius, off));
            };
        }
        j.est = cap_energy_refined(cloud_at, points);
    });
    CsvTable tab({"shape", "method", "d", "seed", "scale", "value", "stderr", "samples", "reference",
                  "reference_kind", "ratio", "ratio_stderr"});
    for (const auto& j : jobs) {
        tab.add_row({shape, j.method, std::int64_t{d}, j.seed, scale, j.est.value, j.est.std_error,
                     std::uint64_t{j.est.samples}, reference, reference_kind, j.est.value / reference,
                     j.est.std_error / reference});
        m["runs"].push_back(json{{"method", j.method}, {"seed", j.seed}, {"estimate", j.est}});
    }
    ExperimentResult out{"capacity-validate", std::move(m), {}, {}};
    out.tables.emplace_back("capacity", std::move(tab));
    return out;
}

ExperimentResult run_excursions(const KeyValueConfig& c, const RunOptions& o, json m) {
    const int d = dim_of(c);
    const Dim dim(d);
    const double r = c.number("r", 0.02), R = c.number("R", 0.1);
    const double target = c.number("target", 50.0);
    const double t = target / expected_excursions(1.0, r, R, dim);
    const double nd = expected_excursions(t, r, R, dim);
    Vec centre = Vec::Constant(d, 0.5);
    if (c.text("centre", "auto") != "auto") {
        const auto v = c.numbers("centre", {});
        for (int k = 0; k < d; ++k) centre[k] = v[static_cast<std::size_t>(k)];
    }
    const auto seeds = seeds_of(c);
    std::vector<ExcursionCount> res(seeds.size());
    std::vector<SimConfig> cfgs(seeds.size());
    parallel_for(seeds.size(), o.threads, [&](std::size_t j) {
        // the grid plays no part here; rho = r only sets the step bound
        SimConfig cfg = SimConfig::make(dim, 3.0 * t, r, 2, seeds[j]);
        cfg.dt = excursion_dt(c, r);
        cfg.validate();
        cfgs[j] = cfg;
        PathWalker walker(cfg);
        ExcursionCounter counter{TorusPoint(centre), r, R};
        auto feed = [&](double t0, const Vec& a, double t1, const Vec& b) { counter.feed(t0, a, t1, b); };
        walker.advance_to(t, feed);
        res[j] = counter.result(t);
        while (!res[j].n_prime_determined && !walker.done()) {
            walker.advance_to(walker.state().time + 0.05 * t, feed);
            res[j] = counter.result(t);
        }
    });
    CsvTable tab({"seed", "t", "r", "R", "N", "N_prime", "n_prime_determined", "N_d", "N_over_N_d", "reference"});
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        const auto& e = res[j];
        tab.add_row({seeds[j], t, r, R, std::uint64_t{e.n}, std::uint64_t{e.n_prime},
                     std::int64_t{e.n_prime_determined}, nd, static_cast<double>(e.n) / nd, 1.0});
        m["runs"].push_back(json{{"seed", seeds[j]}, {"sim", sim_json(cfgs[j])}, {"N_d", nd}});
    }
    ExperimentResult out{"excursion-validate", std::move(m), {}, {}};
    out.tables.emplace_back("excursions", std::move(tab));
    return out;
}

ExperimentResult run_local(const KeyValueConfig& c, const RunOptions& o, json m) {
    const int d = dim_of(c);
    const Dim dim(d);
    const int n = grid_of(c, d);
    const double t = c.number("t", 50.0);
    const double radius = c.number("radius", 0.4);
    const auto probes = static_cast<std::size_t>(c.integer("probes", 1000));
    const auto seeds = seeds_of(c);
    const ShapeSpec E = ShapeSpec::ball(Vec::Zero(d), radius);
    const double cap = cap_ball(radius, dim).value;
    const double reference = std::exp(-cap);
    std::vector<LocalLimitResult> res(seeds.size());
    parallel_for(seeds.size(), o.threads, [&](std::size_t j) {
        res[j] = local_limit_experiment(sim_config(c, d, t, 0.0, n, seeds[j]), E, probes);
    });
    CsvTable tab({"seed", "t", "probes", "unhit", "probability", "stderr", "reference"});
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        tab.add_row({seeds[j], t, std::uint64_t{res[j].probes}, std::uint64_t{res[j].unhit}, res[j].probability(),
                     res[j].standard_error(), reference});
        m["runs"].push_back(json{{"seed", seeds[j]}, {"sim", sim_json(sim_config(c, d, t, 0.0, n, seeds[j]))}});
    }
    const LocalLimitResult all = pool(res);
    CsvTable pooled({"paths", "t", "radius", "probes", "unhit", "probability", "stderr", "capacity", "reference",
                     "ratio"});
    pooled.add_row({std::uint64_t{seeds.size()}, t, radius, std::uint64_t{all.probes}, std::uint64_t{all.unhit},
                    all.probability(), all.standard_error(), cap, reference, all.probability() / reference});
    ExperimentResult out{"local-limit", std::move(m), {}, {}};
    out.tables.emplace_back("local_limit", std::move(tab));
    out.tables.emplace_back("local_limit_pooled", std::move(pooled));
    return out;
}

ExperimentResult run_animals(const KeyValueConfig& c, const RunOptions&, json m) {
    const int d = dim_of(c, 1);
    const int Q = static_cast<int>(c.integer("Q", 6));
    const bool keep = c.integer("write_animals", 0) != 0;
    Enumeration e;
    try {
        e = enumerate(Q, d, static_cast<std::uint64_t>(c.integer("animal_budget", 50000000)), keep);
    } catch (const BudgetExceeded& ex) {
        throw ResourceRefusal(ex.what());
    }
    CsvTable tab({"Q", "count", "cumulative"});
    for (int q = 1; q <= Q; ++q) tab.add_row({std::int64_t{q}, e.counts[static_cast<std::size_t>(q)], e.cumulative(q)});
    const GrowthCheck g = growth_bound_check(e);
    m["growth_constant"] = g.constant;
    ExperimentResult out{"animal-count", std::move(m), {}, {}};
    out.tables.emplace_back("animal_counts", std::move(tab));
    if (keep) {
        std::ostringstream os;
        write_animals(os, e.animals);
        out.files.emplace_back("animals.txt", os.str());
    }
    return out;
}

ExperimentResult run_translate(const KeyValueConfig& c, const RunOptions& o, json m) {
    const int d = dim_of(c);
    const int n = grid_of(c, d);
    const auto ts = ascending(c, "t", 1.0);
    const auto seeds = seeds_of(c);
    const auto scales = ascending(c, "scale", 0.0);
    const double radius = c.number("radius", 0.5);
    const ShapeSpec E = ShapeSpec::ball(Vec::Zero(d), radius);
    struct Job {
        double t, rho;
        std::uint64_t seed;
        std::vector<std::size_t> counts;
    };
    std::vector<Job> jobs;
    for (double t : ts)
        for (auto s : seeds) jobs.push_back({t, rho_at(c, t, d), s, {}});
    parallel_for(jobs.size(), o.threads, [&](std::size_t i) {
        Job& j = jobs[i];
        const SimConfig cfg = sim_config(c, d, j.t, j.rho, n, j.seed);
        const VoxelSet vacant = rasterize_sausage(simulate_path(cfg), j.rho, cfg.grid).voxels.complement();
        const double phi = phi_d(j.t, Dim(d));
        for (double s : scales) j.counts.push_back(disjoint_translates(vacant, E, s * phi));
    });
    CsvTable tab({"t", "seed", "rho", "phi", "radius", "scale", "translates"});
    for (const auto& j : jobs) {
        const double phi = phi_d(j.t, Dim(d));
        for (std::size_t k = 0; k < scales.size(); ++k)
            tab.add_row({j.t, j.seed, j.rho, phi, radius, scales[k], std::uint64_t{j.counts[k]}});
        m["runs"].push_back(json{{"seed", j.seed}, {"t", j.t}, {"sim", sim_json(sim_config(c, d, j.t, j.rho, n, j.seed))}});
    }
    ExperimentResult out{"translate-pack", std::move(m), {}, {}};
    out.tables.emplace_back("translates", std::move(tab));
    return out;
}

double extended(const ExtendedReal& x) {
    return x.is_finite() ? x.value() : std::numeric_limits<double>::infinity();
}

ExperimentResult run_predict(const KeyValueConfig& c, const RunOptions&, json m) {
    const int d = dim_of(c);
    const Dim dim(d);
    const std::string obs = c.text("observable", "capacity");
    const bool unit = c.text("units", "absolute") == "unit-ball";
    CsvTable tab({"observable", "d", "x", "value"});
    for (double v : c.numbers("values", {})) {
        double x = v, y = 0.0;
        try {
            if (obs == "phi") {
                y = phi_d(x, dim);
            } else if (obs == "psi") {
                y = psi_d(x, dim);
            } else if (obs == "J") {
                x = unit ? v * kappa_d(dim) : v;
                y = J_d(x, dim);
            } else if (obs == "I" || obs == "capacity") {
                x = unit ? v * kappa_d(dim) : v;
                y = extended(I_d(x, dim));
            } else if (obs == "volume") {
                x = unit ? v * unit_ball_volume(dim) : v;
                y = extended(rate_volume(x, dim));
            } else if (obs == "eigenvalue") {
                x = unit ? v * lambda_d(dim) : v;
                y = extended(rate_dirichlet(x, dim));
            } else if (obs == "inradius") {
                y = extended(rate_inradius(x, dim));
            } else {
                y = extended(rate_cover(x, dim));
            }
        } catch (const std::domain_error& e) {
            throw ConfigError(std::string("predict: ") + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("predict: ") + e.what());
        }
        tab.add_row({obs, std::int64_t{d}, x, y});
    }
    ExperimentResult out{"predict", std::move(m), {}, {}};
    out.tables.emplace_back("predict", std::move(tab));
    return out;
}

struct Entry {
    double (*cost)(const KeyValueConfig&);
    ExperimentResult (*run)(const KeyValueConfig&, const RunOptions&, json);
};

const std::map<std::string, Entry>& entries() {
    static const std::map<std::string, Entry> e{
        {"inradius-vs-t", {cost_inradius, run_inradius}},
        {"cover-time", {cost_cover, run_cover}},
        {"census", {cost_census, run_census}},
        {"capacity-validate", {cost_capacity, run_capacity}},
        {"excursion-validate", {cost_excursion, run_excursions}},
        {"local-limit", {cost_local, run_local}},
        {"animal-count", {cost_animals, run_animals}},
        {"translate-pack", {cost_translate, run_translate}},
        {"predict", {cost_predict, run_predict}},
    };
    return e;
}

}  // namespace

const CsvTable& ExperimentResult::table(const std::string& stem) const {
    for (const auto& [s, t] : tables)
        if (s == stem) return t;
    throw std::out_of_range("no table '" + stem + "'");
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"inradius-vs-t", "cover-time", "census",
                                                "capacity-validate", "excursion-validate", "local-limit",
                                                "animal-count", "translate-pack", "predict"};
    return names;
}

const std::vector<std::pair<std::string, std::string>>& experiment_keys(const std::string& name) {
    const auto it = key_table().find(name);
    if (it == key_table().end()) throw ConfigError("unknown experiment '" + name + "'");
    return it->second;
}

double estimate_cost(const std::string& name, const KeyValueConfig& cfg) {
    const KeyValueConfig c = resolve(name, cfg);
    try {
        return entries().at(name).cost(c);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
}

ExperimentResult run_experiment(const std::string& name, const KeyValueConfig& cfg, const RunOptions& opt) {
    if (opt.threads < 1) throw ConfigError("threads must be at least 1");
    const KeyValueConfig c = resolve(name, cfg);
    const double est = estimate_cost(name, c);
    if (est > opt.budget)
        throw ResourceRefusal("estimated " + format_number(est) + " CPU seconds exceeds the budget of " +
                              format_number(opt.budget));
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult r = entries().at(name).run(c, opt, manifest_head(name, c, opt, est));
    r.manifest["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json tables = json::object();
    for (const auto& [stem, t] : r.tables) tables[stem + ".csv"] = t.rows();
    r.manifest["tables"] = tables;
    return r;
}

void write_outputs(const ExperimentResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [stem, t] : r.tables) t.save((std::filesystem::path(dir) / (stem + ".csv")).string());
    for (const auto& [file, text] : r.files) {
        std::ofstream f(std::filesystem::path(dir) / file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + file);
        f << text;
    }
    std::ofstream f(std::filesystem::path(dir) / "manifest.json");
    if (!f) throw std::runtime_error("cannot write manifest.json in " + dir);
    f << r.manifest.dump(2) << '\n';
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_at = count;
    std::exception_ptr failure;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace vacant
