#include "vacant/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vacant {

IVec Labeling::lifted(std::size_t cell, const VoxelSet& grid) const {
    IVec c = grid.coords(cell);
    for (int k = 0; k < d; ++k) c[k] += n * winding[cell * static_cast<std::size_t>(d) + k];
    return c;
}

Labeling label_components(const VoxelSet& vacant) {
    Labeling lab;
    lab.d = vacant.dim();
    lab.n = vacant.n();
    const int d = lab.d;
    const int n = lab.n;
    const std::size_t total = vacant.size();
    lab.label.assign(total, -1);
    lab.winding.assign(total * static_cast<std::size_t>(d), 0);
    std::vector<std::size_t> queue;
    std::vector<int> coord(static_cast<std::size_t>(d));
    for (std::size_t s = 0; s < total; ++s) {
        if (!vacant.test(s) || lab.label[s] >= 0) continue;
        const int id = lab.count++;
        std::uint8_t wrap = 0;
        lab.label[s] = id;
        queue.clear();
        queue.push_back(s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t c = queue[head];
            std::size_t rest = c;
            for (int k = 0; k < d; ++k) {
                coord[k] = static_cast<int>(rest % static_cast<std::size_t>(n));
                rest /= static_cast<std::size_t>(n);
            }
            const std::int16_t* wc = &lab.winding[c * static_cast<std::size_t>(d)];
            for (int k = 0; k < d; ++k) {
                const std::size_t stride = vacant.stride(k);
                for (int dir : {-1, 1}) {
                    std::size_t j;
                    int cross = 0;
                    if (dir < 0) {
                        if (coord[k] == 0) {
                            j = c + static_cast<std::size_t>(n - 1) * stride;
                            cross = -1;
                        } else {
                            j = c - stride;
                        }
                    } else {
                        if (coord[k] == n - 1) {
                            j = c - static_cast<std::size_t>(n - 1) * stride;
                            cross = 1;
                        } else {
                            j = c + stride;
                        }
                    }
                    if (!vacant.test(j)) continue;
                    std::int16_t* wj = &lab.winding[j * static_cast<std::size_t>(d)];
                    if (lab.label[j] < 0) {
                        lab.label[j] = id;
                        for (int a = 0; a < d; ++a) wj[a] = wc[a];
                        wj[k] = static_cast<std::int16_t>(wj[k] + cross);
                        queue.push_back(j);
                    } else {
                        for (int a = 0; a < d; ++a) {
                            const int expect = wc[a] + (a == k ? cross : 0);
                            if (wj[a] != expect) wrap |= static_cast<std::uint8_t>(1u << a);
                        }
                    }
                }
            }
        }
        lab.wrap_axes.push_back(wrap);
    }
    return lab;
}

bool detect_wrap(const Labeling& lab, int component) { return lab.wraps(component); }

namespace {

// Cells of each component, grouped by label (counting sort).
struct Groups {
    std::vector<std::size_t> start;  // count + 1 entries
    std::vector<std::uint32_t> cells;
};

Groups group_cells(const Labeling& lab) {
    Groups g;
    g.start.assign(static_cast<std::size_t>(lab.count) + 1, 0);
    for (auto l : lab.label)
        if (l >= 0) ++g.start[static_cast<std::size_t>(l) + 1];
    std::partial_sum(g.start.begin(), g.start.end(), g.start.begin());
    g.cells.resize(g.start.back());
    std::vector<std::size_t> fill(g.start.begin(), g.start.end() - 1);
    for (std::size_t i = 0; i < lab.label.size(); ++i)
        if (lab.label[i] >= 0) g.cells[fill[static_cast<std::size_t>(lab.label[i])]++] = static_cast<std::uint32_t>(i);
    return g;
}

double sweep_diameter(const std::vector<IVec>& pts, double h) {
    if (pts.size() < 2) return 0.0;
    std::size_t from = 0;
    double best = 0.0;
    for (int pass = 0; pass < 4; ++pass) {
        std::size_t far = from;
        double dmax = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double dd = (pts[i] - pts[from]).cast<double>().squaredNorm();
            if (dd > dmax) {
                dmax = dd;
                far = i;
            }
        }
        best = std::max(best, std::sqrt(dmax) * h);
        if (far == from) break;
        from = far;
    }
    return best;
}

}  // namespace

VoxelCloud component_cloud(const Labeling& lab, const VoxelSet& grid, int component) {
    if (lab.wraps(component)) throw CapacityError("component wraps around the torus; capacity undefined here");
    VoxelCloud c;
    c.d = lab.d;
    c.h = 1.0 / lab.n;
    for (std::size_t i = 0; i < lab.label.size(); ++i)
        if (lab.label[i] == component) c.cells.push_back(lab.lifted(i, grid));
    return c;
}

CensusReport measure(const VoxelSet& sausage, const CensusOptions& opt) {
    CensusReport r;
    r.d = sausage.dim();
    r.n = sausage.n();
    const int d = r.d;
    const double h = 1.0 / r.n;
    const double hd = sausage.grid().half_diagonal();
    const VoxelSet vacant = sausage.complement();
    const Labeling lab = label_components(vacant);
    std::vector<std::int32_t> sq;
    if (!sausage.empty()) sq = squared_distance_transform(sausage, opt.threads);
    const Groups groups = group_cells(lab);
    const double cell_volume = std::pow(h, d);

    r.components.resize(static_cast<std::size_t>(lab.count));
    std::vector<int> shell_mark(vacant.size(), -1);
    for (int id = 0; id < lab.count; ++id) {
        ComponentRecord& rec = r.components[static_cast<std::size_t>(id)];
        rec.id = id;
        rec.wrap_axes = lab.wrap_axes[static_cast<std::size_t>(id)];
        rec.wraps = rec.wrap_axes != 0;
        r.any_wrap = r.any_wrap || rec.wraps;
        const std::size_t b = groups.start[static_cast<std::size_t>(id)];
        const std::size_t e = groups.start[static_cast<std::size_t>(id) + 1];
        rec.voxels = e - b;
        rec.volume = static_cast<double>(rec.voxels) * cell_volume;
        std::vector<IVec> pts;
        pts.reserve(rec.voxels);
        std::int32_t deepest = 0;
        for (std::size_t k = b; k < e; ++k) {
            const std::size_t cell = groups.cells[k];
            pts.push_back(lab.lifted(cell, vacant));
            if (!sq.empty()) deepest = std::max(deepest, sq[cell]);
            bool boundary = false;
            const IVec c = vacant.coords(cell);
            for (int a = 0; a < d; ++a)
                for (int dir : {-1, 1}) {
                    IVec q = c;
                    q[a] += dir;
                    const std::size_t j = vacant.index(q);
                    if (vacant.test(j)) continue;
                    boundary = true;
                    if (shell_mark[j] != id) {
                        shell_mark[j] = id;
                        ++rec.shell_voxels;
                    }
                }
            if (boundary) ++rec.boundary_voxels;
        }
        rec.bbox_lo = pts.front();
        rec.bbox_hi = pts.front();
        for (const auto& p : pts) {
            rec.bbox_lo = rec.bbox_lo.cwiseMin(p);
            rec.bbox_hi = rec.bbox_hi.cwiseMax(p);
        }
        rec.inradius = sq.empty() ? std::numeric_limits<double>::infinity() : std::sqrt(double(deepest)) * h;
        rec.diameter = rec.wraps ? std::numeric_limits<double>::quiet_NaN() : sweep_diameter(pts, h);
    }

    auto cloud_of = [&](int id) {
        VoxelCloud c;
        c.d = d;
        c.h = h;
        for (std::size_t k = groups.start[static_cast<std::size_t>(id)];
             k < groups.start[static_cast<std::size_t>(id) + 1]; ++k)
            c.cells.push_back(lab.lifted(groups.cells[k], vacant));
        return c;
    };
    auto ball_bound = [&](const ComponentRecord& rec) {
        const Vec centre = 0.5 * (rec.bbox_lo + rec.bbox_hi).cast<double>() * h;
        double rad = 0.0;
        for (std::size_t k = groups.start[static_cast<std::size_t>(rec.id)];
             k < groups.start[static_cast<std::size_t>(rec.id) + 1]; ++k)
            rad = std::max(rad, (lab.lifted(groups.cells[k], vacant).cast<double>() * h - centre).norm());
        CapacityEstimate est = cap_ball(rad + hd, Dim(d));
        est.method = CapMethod::BallBound;
        return est;
    };

    if (opt.capacity != CensusOptions::Capacity::None && d >= 3) {
        WosParams wp;
        wp.walkers = opt.walkers;
        wp.threads = opt.threads;
        std::vector<std::pair<double, int>> order;
        for (auto& rec : r.components) {
            if (rec.wraps) continue;
            const CapacityEstimate bound = ball_bound(rec);
            if (rec.voxels < opt.volume_floor) {
                rec.capacity = bound;
                continue;
            }
            order.emplace_back(bound.value, rec.id);
        }
        std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first > b.first; });
        double best = 0.0;
        for (const auto& [bound, id] : order) {
            if (opt.capacity == CensusOptions::Capacity::KappaStar && bound < best) break;
            auto& rec = r.components[static_cast<std::size_t>(id)];
            rec.capacity = cap_voxelset(cloud_of(id), wp, mix_seed(opt.seed, static_cast<std::uint64_t>(id)));
            best = std::max(best, rec.capacity->value);
        }
    }

    if (opt.eigen_count > 0) {
        std::vector<int> ids;
        for (const auto& rec : r.components)
            if (!rec.wraps) ids.push_back(rec.id);
        std::sort(ids.begin(), ids.end(), [&](int a, int b) {
            return r.components[static_cast<std::size_t>(a)].voxels > r.components[static_cast<std::size_t>(b)].voxels;
        });
        if (static_cast<int>(ids.size()) > opt.eigen_count) ids.resize(static_cast<std::size_t>(opt.eigen_count));
        for (int id : ids) {
            auto& rec = r.components[static_cast<std::size_t>(id)];
            std::vector<int> dims(static_cast<std::size_t>(d));
            std::vector<std::size_t> strides(static_cast<std::size_t>(d));
            std::size_t total = 1;
            for (int k = 0; k < d; ++k) {
                dims[k] = rec.bbox_hi[k] - rec.bbox_lo[k] + 3;
                strides[k] = total;
                total *= static_cast<std::size_t>(dims[k]);
            }
            std::vector<std::uint8_t> mask(total, 0);
            for (std::size_t k = groups.start[static_cast<std::size_t>(id)];
                 k < groups.start[static_cast<std::size_t>(id) + 1]; ++k) {
                const IVec p = lab.lifted(groups.cells[k], vacant);
                std::size_t i = 0;
                for (int a = 0; a < d; ++a) i += static_cast<std::size_t>(p[a] - rec.bbox_lo[a] + 1) * strides[a];
                mask[i] = 1;
            }
            EigenOptions eo;
            eo.tol = opt.eigen_tol;
            rec.eigen = dirichlet_eigenvalue(mask, dims, h, eo);
        }
    }

    r.kappa_star = kappa_star(r);
    r.kappa_star_censored = r.any_wrap;
    return r;
}

std::optional<double> kappa_star(const CensusReport& r) {
    std::optional<double> best;
    for (const auto& rec : r.components) {
        if (rec.wraps || !rec.capacity || rec.capacity->method == CapMethod::BallBound) continue;
        if (!best || rec.capacity->value > *best) best = rec.capacity->value;
    }
    return best;
}

std::size_t chi_counts(const CensusReport& r, double kappa, double rho, double phi) {
    const double threshold = kappa * std::pow(phi, r.d - 2.0);
    std::size_t count = 0;
    for (const auto& rec : r.components) {
        if (rec.wraps || rec.inradius < rho) continue;
        if (kappa > 0.0 && (!rec.capacity || rec.capacity->value < threshold)) continue;
        ++count;
    }
    return count;
}

IsoperimetricCheck isoperimetric_check(const ComponentRecord& rec, int d, double h) {
    IsoperimetricCheck c;
    const Dim dim(d);
    const double cell = std::pow(h, d);
    const double vd = unit_ball_volume(dim);
    const double p = (d - 2.0) / d;
    const double inner = static_cast<double>(rec.voxels - rec.boundary_voxels) * cell;
    const double outer = static_cast<double>(rec.voxels + rec.shell_voxels) * cell;
    c.vol_ratio = std::pow(rec.volume / vd, p);
    c.vol_lo = std::pow(inner / vd, p);
    c.vol_hi = std::pow(outer / vd, p);
    if (rec.capacity) {
        c.cap_ratio = rec.capacity->value / kappa_d(dim);
        c.cap_tol = 3.0 * rec.capacity->std_error / kappa_d(dim);
        c.capacity_ok = c.cap_ratio + c.cap_tol >= c.vol_lo;
    }
    if (rec.eigen) {
        const double lam = rec.eigen->lambda * (1.0 + 3.0 * rec.eigen->residual);
        c.eig_ratio = std::pow(lambda_d(dim) / lam, 0.5 * (d - 2.0));
        c.eigen_ok = c.vol_hi >= c.eig_ratio;
    }
    return c;
}

double max_volume(const CensusReport& r) {
    if (r.components.empty()) throw NoComponents();
    double v = 0.0;
    for (const auto& rec : r.components) v = std::max(v, rec.volume);
    return v;
}

double max_diameter(const CensusReport& r) {
    if (r.components.empty()) throw NoComponents();
    double v = 0.0;
    for (const auto& rec : r.components)
        if (!rec.wraps) v = std::max(v, rec.diameter);
    return v;
}

std::optional<double> min_eigenvalue(const CensusReport& r) {
    std::optional<double> best;
    for (const auto& rec : r.components)
        if (rec.eigen && (!best || rec.eigen->lambda < *best)) best = rec.eigen->lambda;
    return best;
}

std::size_t disjoint_translates(const VoxelSet& vacant, const ShapeSpec& E, double scale) {
    if (E.empty()) throw std::invalid_argument("disjoint_translates: empty shape");
    if (!(scale > 0.0)) throw std::invalid_argument("disjoint_translates: scale must be positive");
    const int d = vacant.dim();
    const int n = vacant.n();
    const double h = 1.0 / n;
    const double hd = vacant.grid().half_diagonal();
    Vec lo, hi;
    E.bounds(lo, hi);
    std::vector<IVec> stencil;
    IVec first(d), last(d);
    for (int k = 0; k < d; ++k) {
        first[k] = static_cast<int>(std::floor((scale * lo[k] - hd) / h));
        last[k] = static_cast<int>(std::ceil((scale * hi[k] + hd) / h));
        if (last[k] - first[k] + 1 > n) return 0;
    }
    IVec k = first;
    while (true) {
        const Vec p = k.cast<double>() * h;
        if (E.distance(p / scale) * scale <= hd) stencil.push_back(k);
        int a = 0;
        while (a < d && k[a] == last[a]) {
            k[a] = first[a];
            ++a;
        }
        if (a == d) break;
        ++k[a];
    }
    if (stencil.empty()) return 0;
    std::sort(stencil.begin(), stencil.end(),
              [](const IVec& a, const IVec& b) { return a.squaredNorm() < b.squaredNorm(); });

    std::vector<std::uint8_t> used(vacant.size(), 0);
    std::size_t count = 0;
    std::vector<std::size_t> cells(stencil.size());
    for (std::size_t i = 0; i < vacant.size(); ++i) {
        const IVec base = vacant.coords(i);
        bool ok = true;
        for (std::size_t s = 0; s < stencil.size() && ok; ++s) {
            cells[s] = vacant.index(base + stencil[s]);
            ok = vacant.test(cells[s]) && !used[cells[s]];
        }
        if (!ok) continue;
        for (std::size_t c : cells) used[c] = 1;
        ++count;
    }
    return count;
}

}  // namespace vacant
