#include "vacant/torus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "vacant/parallel.hpp"

namespace vacant {

namespace {

constexpr std::int32_t kUnreached = std::numeric_limits<std::int32_t>::max() / 4;

inline long long floor_mod(long long a, long long m) {
    const long long r = a % m;
    return r < 0 ? r + m : r;
}

// Felzenszwalb-Huttenlocher lower envelope of parabolas on an index window.
// `f(q)` gives the site cost at window position q (kUnreached = no site);
// the result at query position i is min_q f(q) + (i - q)^2.
struct Envelope1D {
    std::vector<long long> v;
    std::vector<double> z;

    template <class SiteFn, class OutFn>
    void run(long long first, long long last, SiteFn&& f, long long qfirst, long long qlast,
             OutFn&& out) {
        const auto len = static_cast<std::size_t>(last - first + 1);
        v.resize(len);
        z.resize(len + 1);
        long long k = -1;
        for (long long q = first; q <= last; ++q) {
            const std::int32_t fq = f(q);
            if (fq >= kUnreached) continue;
            const double cq = static_cast<double>(fq) + static_cast<double>(q) * q;
            if (k < 0) {
                k = 0;
                v[0] = q;
                z[0] = -std::numeric_limits<double>::infinity();
                z[1] = std::numeric_limits<double>::infinity();
                continue;
            }
            double s;
            while (true) {
                const long long p = v[k];
                const double cp = static_cast<double>(f(p)) + static_cast<double>(p) * p;
                s = (cq - cp) / (2.0 * static_cast<double>(q - p));
                if (s <= z[k]) {
                    if (k == 0) {
                        k = -1;
                        break;
                    }
                    --k;
                } else {
                    break;
                }
            }
            if (k < 0) {
                k = 0;
                v[0] = q;
                z[0] = -std::numeric_limits<double>::infinity();
                z[1] = std::numeric_limits<double>::infinity();
                continue;
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = std::numeric_limits<double>::infinity();
        }
        if (k < 0) {
            for (long long i = qfirst; i <= qlast; ++i) out(i, kUnreached);
            return;
        }
        long long j = 0;
        for (long long i = qfirst; i <= qlast; ++i) {
            while (z[j + 1] < static_cast<double>(i)) ++j;
            const long long p = v[j];
            const long long val = static_cast<long long>(f(p)) + (i - p) * (i - p);
            out(i, static_cast<std::int32_t>(std::min<long long>(val, kUnreached)));
        }
    }
};

void put_u32(std::ostream& os, std::uint32_t x) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xFF);
    os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t x) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xFF);
    os.write(b, 8);
}

std::uint64_t get_le(std::istream& is, int bytes) {
    unsigned char b[8] = {};
    is.read(reinterpret_cast<char*>(b), bytes);
    if (!is) throw std::runtime_error("voxel set: truncated stream");
    std::uint64_t x = 0;
    for (int i = bytes - 1; i >= 0; --i) x = (x << 8) | b[i];
    return x;
}

}  // namespace

Vec wrap_coords(const Vec& x) {
    Vec y(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        double w = x[k] - std::floor(x[k]);
        if (w >= 1.0) w = 0.0;  // guards -tiny rounding up to 1.0
        y[k] = w;
    }
    return y;
}

Vec min_image(const Vec& delta) {
    Vec y(delta.size());
    for (Eigen::Index k = 0; k < delta.size(); ++k) y[k] = delta[k] - std::floor(delta[k] + 0.5);
    return y;
}

TorusPoint::TorusPoint(const Vec& coords) : coords_(wrap_coords(coords)) {}

double torus_dist(const TorusPoint& x, const TorusPoint& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("torus_dist: dimension mismatch");
    return min_image(x.coords() - y.coords()).norm();
}

GridSpec GridSpec::centred(int d, int n) {
    GridSpec g;
    g.d = d;
    g.n = n;
    g.offset = Vec::Constant(d, 0.5 / n);
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("grid: unsupported dimension");
    if (n < 2) throw std::invalid_argument("grid: n must be >= 2");
    if (offset.size() != d) throw std::invalid_argument("grid: offset dimension mismatch");
    const double cells = std::pow(static_cast<double>(n), d);
    if (cells > 4.0e9) throw std::invalid_argument("grid: n^d too large");
    if (static_cast<double>(d) * (n / 2.0 + 1.0) * (n / 2.0 + 1.0) >= kUnreached)
        throw std::invalid_argument("grid: squared distances overflow int32");
}

double GridSpec::half_diagonal() const { return 0.5 * std::sqrt(static_cast<double>(d)) / n; }

std::size_t GridSpec::cell_count() const {
    std::size_t c = 1;
    for (int k = 0; k < d; ++k) c *= static_cast<std::size_t>(n);
    return c;
}

Vec GridSpec::centre(const IVec& idx) const {
    Vec c(d);
    for (int k = 0; k < d; ++k) c[k] = offset[k] + static_cast<double>(idx[k]) / n;
    return c;
}

IVec GridSpec::cell_of(const Vec& x) const {
    IVec idx(d);
    for (int k = 0; k < d; ++k) {
        const auto i = static_cast<long long>(std::floor((x[k] - offset[k]) * n + 0.5));
        idx[k] = static_cast<int>(floor_mod(i, n));
    }
    return idx;
}

std::vector<TorusPoint> grid_points(const GridSpec& spec) {
    spec.validate();
    std::vector<TorusPoint> pts;
    pts.reserve(spec.cell_count());
    IVec idx = IVec::Zero(spec.d);
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
        pts.emplace_back(spec.centre(idx));
        for (int k = 0; k < spec.d; ++k) {
            if (++idx[k] < spec.n) break;
            idx[k] = 0;
        }
    }
    return pts;
}

VoxelSet::VoxelSet(GridSpec grid, bool filled) : grid_(std::move(grid)) {
    grid_.validate();
    strides_.resize(grid_.d);
    std::size_t s = 1;
    for (int k = 0; k < grid_.d; ++k) {
        strides_[k] = s;
        s *= static_cast<std::size_t>(grid_.n);
    }
    occ_.assign(s, filled ? 1 : 0);
}

std::size_t VoxelSet::count() const {
    return static_cast<std::size_t>(std::count(occ_.begin(), occ_.end(), std::uint8_t{1}));
}

std::size_t VoxelSet::index(const IVec& idx) const {
    std::size_t i = 0;
    for (int k = 0; k < grid_.d; ++k)
        i += static_cast<std::size_t>(floor_mod(idx[k], grid_.n)) * strides_[k];
    return i;
}

IVec VoxelSet::coords(std::size_t i) const {
    IVec c(grid_.d);
    for (int k = 0; k < grid_.d; ++k) {
        c[k] = static_cast<int>(i % static_cast<std::size_t>(grid_.n));
        i /= static_cast<std::size_t>(grid_.n);
    }
    return c;
}

VoxelSet VoxelSet::complement() const {
    VoxelSet c(*this);
    for (auto& b : c.occ_) b ^= 1;
    return c;
}

bool VoxelSet::subset_of(const VoxelSet& other) const {
    if (other.size() != size()) throw std::invalid_argument("voxel set: grid mismatch");
    for (std::size_t i = 0; i < occ_.size(); ++i)
        if (occ_[i] && !other.occ_[i]) return false;
    return true;
}

VoxelSet& VoxelSet::operator|=(const VoxelSet& other) {
    if (other.size() != size()) throw std::invalid_argument("voxel set: grid mismatch");
    for (std::size_t i = 0; i < occ_.size(); ++i) occ_[i] |= other.occ_[i];
    return *this;
}

bool operator==(const VoxelSet& a, const VoxelSet& b) {
    return a.grid_.d == b.grid_.d && a.grid_.n == b.grid_.n && a.grid_.offset == b.grid_.offset &&
           a.occ_ == b.occ_;
}

std::vector<std::int32_t> squared_distance_transform(const VoxelSet& sites, int threads) {
    const int d = sites.dim();
    const long long n = sites.n();
    const std::size_t total = sites.size();
    std::vector<std::int32_t> dist(total);
    bool any = false;
    for (std::size_t i = 0; i < total; ++i) {
        dist[i] = sites.test(i) ? 0 : kUnreached;
        any = any || sites.test(i);
    }
    if (!any) throw NoSitesError();

    const long long lo = -(n / 2);
    const long long hi = n - 1 + (n + 1) / 2;
    for (int axis = 0; axis < d; ++axis) {
        const std::size_t stride = sites.stride(axis);
        const std::size_t lines = total / static_cast<std::size_t>(n);
        parallel_for(lines, threads, [&](std::size_t begin, std::size_t end) {
            Envelope1D env;
            std::vector<std::int32_t> line(static_cast<std::size_t>(n));
            for (std::size_t L = begin; L < end; ++L) {
                const std::size_t outer = L / stride;
                const std::size_t inner = L % stride;
                const std::size_t base = outer * stride * static_cast<std::size_t>(n) + inner;
                for (long long j = 0; j < n; ++j) line[j] = dist[base + j * stride];
                env.run(
                    lo, hi, [&](long long q) { return line[floor_mod(q, n)]; }, 0, n - 1,
                    [&](long long i, std::int32_t v) { dist[base + i * stride] = v; });
            }
        });
    }
    return dist;
}

std::vector<double> distance_transform(const VoxelSet& sites, int threads) {
    const auto sq = squared_distance_transform(sites, threads);
    std::vector<double> out(sq.size());
    const double h = sites.grid().cell();
    for (std::size_t i = 0; i < sq.size(); ++i) out[i] = std::sqrt(static_cast<double>(sq[i])) * h;
    return out;
}

std::vector<std::int32_t> squared_distance_transform_box(std::span<const std::uint8_t> mask,
                                                         std::span<const int> dims) {
    std::size_t total = 1;
    std::vector<std::size_t> strides(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) {
        strides[k] = total;
        total *= static_cast<std::size_t>(dims[k]);
    }
    if (mask.size() != total) throw std::invalid_argument("distance transform: mask size mismatch");
    std::vector<std::int32_t> dist(total);
    for (std::size_t i = 0; i < total; ++i) dist[i] = mask[i] ? 0 : kUnreached;
    Envelope1D env;
    std::vector<std::int32_t> line;
    for (std::size_t axis = 0; axis < dims.size(); ++axis) {
        const long long n = dims[axis];
        const std::size_t stride = strides[axis];
        line.resize(static_cast<std::size_t>(n));
        const std::size_t lines = total / static_cast<std::size_t>(n);
        for (std::size_t L = 0; L < lines; ++L) {
            const std::size_t outer = L / stride;
            const std::size_t inner = L % stride;
            const std::size_t base = outer * stride * static_cast<std::size_t>(n) + inner;
            for (long long j = 0; j < n; ++j) line[j] = dist[base + j * stride];
            env.run(
                0, n - 1, [&](long long q) { return line[q]; }, 0, n - 1,
                [&](long long i, std::int32_t v) { dist[base + i * stride] = v; });
        }
    }
    return dist;
}

VoxelSet enlarge(const VoxelSet& v, double r, int threads) {
    if (r < 0.0) throw std::invalid_argument("enlarge: negative radius");
    if (v.empty() || r == 0.0) return v;
    const auto sq = squared_distance_transform(v, threads);
    const double rn = r * v.n();
    const double limit = rn * rn * (1.0 + 1e-12);
    VoxelSet out(v.grid());
    for (std::size_t i = 0; i < sq.size(); ++i) out.set(i, static_cast<double>(sq[i]) <= limit);
    return out;
}

VoxelSet shrink(const VoxelSet& v, double r, int threads) {
    if (r < 0.0) throw std::invalid_argument("shrink: negative radius");
    const VoxelSet c = v.complement();
    if (c.empty() || r == 0.0) return v;
    return enlarge(c, r, threads).complement();
}

void write_voxelset(std::ostream& os, const VoxelSet& v) {
    os.write("VXST", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(v.dim()));
    put_u32(os, static_cast<std::uint32_t>(v.n()));
    for (int k = 0; k < v.dim(); ++k) put_u64(os, std::bit_cast<std::uint64_t>(v.grid().offset[k]));
    put_u64(os, v.size());
    std::vector<char> bytes((v.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.test(i)) bytes[i / 8] = static_cast<char>(bytes[i / 8] | (1 << (i % 8)));
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

VoxelSet read_voxelset(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "VXST", 4) != 0) throw std::runtime_error("voxel set: bad magic");
    if (get_le(is, 4) != 1) throw std::runtime_error("voxel set: unsupported version");
    GridSpec g;
    g.d = static_cast<int>(get_le(is, 4));
    g.n = static_cast<int>(get_le(is, 4));
    if (g.d < 1 || g.d > kMaxDim) throw std::runtime_error("voxel set: bad dimension");
    g.offset = Vec(g.d);
    for (int k = 0; k < g.d; ++k) g.offset[k] = std::bit_cast<double>(get_le(is, 8));
    VoxelSet v(g);
    if (get_le(is, 8) != v.size()) throw std::runtime_error("voxel set: cell count mismatch");
    std::vector<char> bytes((v.size() + 7) / 8);
    is.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!is) throw std::runtime_error("voxel set: truncated bitmap");
    for (std::size_t i = 0; i < v.size(); ++i)
        v.set(i, (static_cast<unsigned char>(bytes[i / 8]) >> (i % 8)) & 1);
    return v;
}

}  // namespace vacant
