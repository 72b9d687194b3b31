#include "vacant/animals.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include "vacant/boxgrid.hpp"

namespace vacant {

bool lex_less(const IVec& a, const IVec& b) {
    for (Eigen::Index k = 0; k < a.size(); ++k)
        if (a[k] != b[k]) return a[k] < b[k];
    return false;
}

namespace {

bool lex_equal(const IVec& a, const IVec& b) { return a.size() == b.size() && a == b; }

std::vector<IVec> linf_offsets(int d) {
    std::vector<IVec> out;
    IVec off = IVec::Constant(d, -1);
    while (true) {
        if (!off.isZero()) out.push_back(off);
        int k = 0;
        while (k < d && off[k] == 1) off[k++] = -1;
        if (k == d) break;
        ++off[k];
    }
    return out;
}

}  // namespace

bool LatticeAnimal::contains(const IVec& c) const {
    return std::binary_search(cells.begin(), cells.end(), c, lex_less);
}

void LatticeAnimal::normalize() {
    std::sort(cells.begin(), cells.end(), lex_less);
    cells.erase(std::unique(cells.begin(), cells.end(), lex_equal), cells.end());
}

bool LatticeAnimal::connected() const {
    if (cells.empty()) return false;
    std::vector<char> seen(cells.size(), 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (seen[j]) continue;
            if ((cells[i] - cells[j]).cwiseAbs().maxCoeff() == 1) {
                seen[j] = 1;
                ++reached;
                queue.push_back(j);
            }
        }
    }
    return reached == cells.size();
}

std::uint64_t Enumeration::cumulative(int q) const {
    std::uint64_t s = 0;
    for (int i = 1; i <= q && i < static_cast<int>(counts.size()); ++i) s += counts[i];
    return s;
}

namespace {

struct Redelmeier {
    int d, Q;
    std::uint64_t budget;
    bool keep;
    int side;
    std::vector<std::size_t> strides;
    std::vector<std::ptrdiff_t> nb;  // linear offsets of the 3^d - 1 neighbours
    std::vector<char> marked;
    std::vector<std::size_t> current;
    Enumeration* out;
    std::uint64_t produced = 0;

    Redelmeier(int d_, int Q_, std::uint64_t budget_, bool keep_, Enumeration* out_)
        : d(d_), Q(Q_), budget(budget_), keep(keep_), side(2 * Q_ + 1), out(out_) {
        strides.resize(static_cast<std::size_t>(d));
        std::size_t total = 1;
        for (int k = 0; k < d; ++k) {
            strides[k] = total;
            total *= static_cast<std::size_t>(side);
        }
        marked.assign(total, 0);
        for (const auto& off : linf_offsets(d)) {
            std::ptrdiff_t s = 0;
            for (int k = 0; k < d; ++k) s += off[k] * static_cast<std::ptrdiff_t>(strides[k]);
            nb.push_back(s);
        }
    }

    std::size_t origin() const {
        std::size_t i = 0;
        for (int k = 0; k < d; ++k) i += static_cast<std::size_t>(Q) * strides[k];
        return i;
    }

    IVec coords(std::size_t i) const {
        IVec c(d);
        for (int k = 0; k < d; ++k) {
            c[k] = static_cast<int>(i % static_cast<std::size_t>(side)) - Q;
            i /= static_cast<std::size_t>(side);
        }
        return c;
    }

    void record() {
        if (++produced > budget)
            throw BudgetExceeded("enumerate: more than " + std::to_string(budget) + " animals");
        ++out->counts[current.size()];
        if (keep) {
            LatticeAnimal a;
            a.d = d;
            for (std::size_t i : current) a.cells.push_back(coords(i));
            a.normalize();
            out->animals.push_back(std::move(a));
        }
    }

    void run(std::vector<std::size_t> untried) {
        while (!untried.empty()) {
            const std::size_t v = untried.back();
            untried.pop_back();
            current.push_back(v);
            record();
            if (static_cast<int>(current.size()) < Q) {
                std::vector<std::size_t> fresh;
                for (std::ptrdiff_t s : nb) {
                    const auto w = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(v) + s);
                    if (!marked[w]) {
                        marked[w] = 1;
                        fresh.push_back(w);
                    }
                }
                std::vector<std::size_t> next = untried;
                next.insert(next.end(), fresh.begin(), fresh.end());
                run(std::move(next));
                for (std::size_t w : fresh) marked[w] = 0;
            }
            current.pop_back();
        }
    }
};

}  // namespace

Enumeration enumerate(int Q, int d, std::uint64_t budget, bool keep_animals) {
    if (Q < 1) throw std::invalid_argument("enumerate: Q must be at least 1");
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("enumerate: unsupported dimension");
    Enumeration e;
    e.d = d;
    e.max_size = Q;
    e.counts.assign(static_cast<std::size_t>(Q) + 1, 0);
    Redelmeier r(d, Q, budget, keep_animals, &e);
    const std::size_t o = r.origin();
    r.marked[o] = 1;
    r.run({o});
    return e;
}

GrowthCheck growth_bound_check(const Enumeration& e) {
    GrowthCheck g;
    std::uint64_t prev = 0;
    for (int q = 1; q <= e.max_size; ++q) {
        const std::uint64_t c = e.cumulative(q);
        g.ratios.push_back(std::log(static_cast<double>(c)) / q);
        if (q > 1 && e.counts[q] <= e.counts[q - 1]) g.strictly_increasing = false;
        prev = c;
    }
    (void)prev;
    g.constant = g.ratios.empty() ? 0.0 : *std::max_element(g.ratios.begin(), g.ratios.end());
    return g;
}

Approximation approximate_set(const ShapeSpec& E, int n, double phi, double rho) {
    const int d = E.dim();
    if (E.empty()) throw std::invalid_argument("approximate_set: empty shape");
    if (!(phi > 0.0) || !(rho > 0.0) || n < 1) throw std::invalid_argument("approximate_set: bad parameters");
    const double need = 2.0 * std::sqrt(static_cast<double>(d));
    if (rho * n < need) {
        const int minimal = static_cast<int>(std::ceil(need / rho - 1e-12));
        throw PreconditionError("approximate_set: need rho n >= 2 sqrt(d); least n is " + std::to_string(minimal),
                                minimal);
    }
    Approximation a;
    a.scale = 1.0 / (n * phi);
    a.outer = rho / phi;
    a.animal.d = d;
    const double reach = rho / (4.0 * phi);
    Vec lo, hi;
    E.bounds(lo, hi);
    IVec first(d), count(d);
    for (int k = 0; k < d; ++k) {
        first[k] = static_cast<int>(std::floor((lo[k] - reach) / a.scale - 0.5)) - 1;
        const int last = static_cast<int>(std::ceil((hi[k] + reach) / a.scale + 0.5)) + 1;
        count[k] = last - first[k] + 1;
    }
    const BoxGrid box(first, count);
    for (std::size_t i = 0; i < box.size(); ++i) {
        const IVec z = box.point(i);
        const Vec c = z.cast<double>();
        const Vec blo = (c.array() - 0.5).matrix() * a.scale;
        const Vec bhi = (c.array() + 0.5).matrix() * a.scale;
        if (E.distance_to_box(blo, bhi) <= reach) a.animal.cells.push_back(z);
    }
    a.animal.normalize();
    return a;
}

bool in_union(const Approximation& a, const Vec& x) {
    const int d = a.animal.d;
    const Vec y = x / a.scale;
    // Points on shared faces belong to several cubes; try both neighbours there.
    IVec base(d);
    std::vector<int> amb;
    for (int k = 0; k < d; ++k) {
        base[k] = static_cast<int>(std::lround(y[k]));
        if (std::abs(std::abs(y[k] - base[k]) - 0.5) < 1e-12) amb.push_back(k);
    }
    const std::size_t combos = std::size_t{1} << amb.size();
    for (std::size_t m = 0; m < combos; ++m) {
        IVec z = base;
        for (std::size_t j = 0; j < amb.size(); ++j)
            if (m >> j & 1) z[amb[j]] += (y[amb[j]] > base[amb[j]] ? 1 : -1);
        if (a.animal.contains(z)) return true;
    }
    return false;
}

SandwichCheck sandwich_violations(const ShapeSpec& E, const Approximation& a, std::size_t samples,
                                  std::uint64_t seed) {
    SandwichCheck out;
    out.samples = samples;
    const int d = E.dim();
    CounterRng rng(seed, Stream::Sampling);
    Vec lo, hi;
    E.bounds(lo, hi);
    // Inner: rejection-sample E from its bounding box.
    for (std::size_t s = 0; s < samples; ++s) {
        Vec x(d);
        do {
            for (int k = 0; k < d; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * rng.uniform();
        } while (!E.contains(x));
        if (!in_union(a, x)) ++out.inner_violations;
    }
    // Outer: uniform points of E(A).
    const auto& cells = a.animal.cells;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(cells.size()));
        Vec x(d);
        for (int k = 0; k < d; ++k) x[k] = (cells[std::min(j, cells.size() - 1)][k] + rng.uniform() - 0.5) * a.scale;
        if (E.distance(x) > a.outer) ++out.outer_violations;
    }
    return out;
}

namespace {

struct Padded {
    BoxGrid box;
    std::vector<std::uint8_t> mask;
};

Padded pad_box(const LatticeAnimal& a) {
    const int d = a.d;
    IVec lo = a.cells.front(), hi = a.cells.front();
    for (const auto& c : a.cells) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    IVec origin = lo.array() - 1;
    IVec dims = (hi - lo).array() + 3;
    Padded p{BoxGrid(origin, dims), {}};
    p.mask.assign(p.box.size(), 0);
    for (const auto& c : a.cells) p.mask[p.box.index(c)] = 1;
    (void)d;
    return p;
}

}  // namespace

int complement_components(const LatticeAnimal& a) {
    if (a.cells.empty()) return 1;
    const Padded p = pad_box(a);
    std::vector<int> labels;
    return p.box.label(p.mask, 0, true, labels);
}

LatticeAnimal fill_holes(const LatticeAnimal& a) {
    if (a.cells.empty()) return a;
    const Padded p = pad_box(a);
    std::vector<int> labels;
    p.box.label(p.mask, 0, true, labels);
    // The padding shell is connected and contains cell 0.
    const int outside = labels[0];
    LatticeAnimal out = a;
    for (std::size_t i = 0; i < p.box.size(); ++i)
        if (!p.mask[i] && labels[i] != outside) out.cells.push_back(p.box.point(i));
    out.normalize();
    return out;
}

SurfaceCloud animal_surface(const LatticeAnimal& a, double scale) {
    SurfaceCloud c;
    c.d = a.d;
    const double area = std::pow(scale, a.d - 1.0);
    for (const auto& z : a.cells) {
        for (int k = 0; k < a.d; ++k) {
            for (int s : {-1, 1}) {
                IVec w = z;
                w[k] += s;
                if (a.contains(w)) continue;
                Vec p = z.cast<double>();
                p[k] += 0.5 * s;
                c.points.push_back(p * scale);
                c.areas.push_back(area);
            }
        }
    }
    return c;
}

void write_animals(std::ostream& os, const std::vector<LatticeAnimal>& animals) {
    for (const auto& a : animals) {
        for (std::size_t i = 0; i < a.cells.size(); ++i) {
            if (i) os << ' ';
            os << '(';
            for (Eigen::Index k = 0; k < a.cells[i].size(); ++k) os << (k ? "," : "") << a.cells[i][k];
            os << ')';
        }
        os << '\n';
    }
}

}  // namespace vacant
