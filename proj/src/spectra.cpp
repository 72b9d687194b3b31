#include "vacant/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vacant/torus.hpp"

namespace vacant {

double bessel_zero(double nu) {
    if (nu < 0.0) throw std::invalid_argument("bessel_zero: nu must be >= 0");
    // J_nu is positive on (0, j_{nu,1}); scan for the first sign change.
    const double step = 0.05;
    double a = std::max(nu, step);
    while (std::cyl_bessel_j(nu, a) <= 0.0) a *= 0.5;
    double b = a + step;
    while (std::cyl_bessel_j(nu, b) > 0.0) {
        a = b;
        b += step;
    }
    for (int i = 0; i < 200 && b - a > 1e-15 * b; ++i) {
        const double m = 0.5 * (a + b);
        (std::cyl_bessel_j(nu, m) > 0.0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

double lambda_d(Dim d) {
    const double j = bessel_zero(d / 2.0 - 1.0);
    return 0.5 * j * j;
}

namespace {

struct Strides {
    std::vector<std::size_t> s;
    std::size_t total = 1;
    explicit Strides(std::span<const int> dims) : s(dims.size()) {
        for (std::size_t k = 0; k < dims.size(); ++k) {
            s[k] = total;
            total *= static_cast<std::size_t>(dims[k]);
        }
    }
};

// Calls fn(j) for the face neighbours of box cell i, or fn(npos) past the border.
template <class Fn>
void face_neighbours(std::size_t i, std::span<const int> dims, const Strides& st, Fn&& fn) {
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const auto c = static_cast<int>((i / st.s[k]) % static_cast<std::size_t>(dims[k]));
        fn(c > 0 ? i - st.s[k] : std::string::npos);
        fn(c + 1 < dims[k] ? i + st.s[k] : std::string::npos);
    }
}

class Operator {
  public:
    Operator(std::span<const std::uint8_t> mask, std::span<const int> dims, double h)
        : deg_(2 * static_cast<int>(dims.size())), scale_(0.5 / (h * h)) {
        const Strides st(dims);
        std::vector<std::int64_t> id(st.total, -1);
        for (std::size_t i = 0; i < st.total; ++i)
            if (mask[i]) {
                id[i] = static_cast<std::int64_t>(cells_.size());
                cells_.push_back(i);
            }
        nb_.reserve(cells_.size() * static_cast<std::size_t>(deg_));
        for (std::size_t c : cells_) {
            face_neighbours(c, dims, st, [&](std::size_t j) {
                nb_.push_back(j == std::string::npos ? -1 : id[j]);
            });
        }
    }

    std::size_t size() const { return cells_.size(); }
    const std::vector<std::size_t>& cells() const { return cells_; }

    // y = (A - sigma) x with A = -1/2 Laplacian.
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y, double sigma) const {
        const auto n = static_cast<Eigen::Index>(cells_.size());
        const double diag = scale_ * deg_ - sigma;
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0.0;
            const std::int64_t* nb = nb_.data() + static_cast<std::size_t>(i) * deg_;
            for (int k = 0; k < deg_; ++k)
                if (nb[k] >= 0) s += x[nb[k]];
            y[i] = diag * x[i] - scale_ * s;
        }
    }

  private:
    int deg_;
    double scale_;
    std::vector<std::size_t> cells_;
    std::vector<std::int64_t> nb_;
};

struct CgOutcome {
    int iterations = 0;
    bool indefinite = false;
};

// Solves (A - sigma) y = b from the initial guess in y, to |r| <= eta |b|.
CgOutcome conjugate_gradient(const Operator& op, double sigma, const Eigen::VectorXd& b,
                             Eigen::VectorXd& y, double eta, int max_iter) {
    CgOutcome out;
    Eigen::VectorXd r(b.size()), p(b.size()), q(b.size());
    op.apply(y, q, sigma);
    r = b - q;
    p = r;
    double rr = r.squaredNorm();
    const double target = eta * eta * b.squaredNorm();
    while (rr > target && out.iterations < max_iter) {
        op.apply(p, q, sigma);
        const double pq = p.dot(q);
        if (pq <= 0.0) {
            out.indefinite = true;
            return out;
        }
        const double alpha = rr / pq;
        y += alpha * p;
        r -= alpha * q;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
        ++out.iterations;
    }
    return out;
}

EigenResult solve(std::span<const std::uint8_t> mask, std::span<const int> dims, double h,
                  const EigenOptions& opt) {
    EigenResult res;
    res.h = h;
    res.grid_n = static_cast<int>(std::lround(1.0 / h));
    const Operator op(mask, dims, h);
    const int d = static_cast<int>(dims.size());
    if (op.size() == 0) throw EigenError("eigenvalue: empty component");
    if (op.size() == 1) {
        res.single_cell = true;
        res.lambda = 0.5 * d * M_PI * M_PI / (h * h);
        return res;
    }

    // Seed: distance to the exterior, in a box padded by one cell.
    std::vector<int> pdims(dims.begin(), dims.end());
    for (int& v : pdims) v += 2;
    const Strides st(dims), pst(pdims);
    std::vector<std::uint8_t> exterior(pst.total, 1);
    for (std::size_t i = 0; i < st.total; ++i) {
        if (!mask[i]) continue;
        std::size_t j = 0;
        for (int k = 0; k < d; ++k)
            j += ((i / st.s[k]) % static_cast<std::size_t>(dims[k]) + 1) * pst.s[k];
        exterior[j] = 0;
    }
    const auto sq = squared_distance_transform_box(exterior, pdims);
    Eigen::VectorXd x(static_cast<Eigen::Index>(op.size()));
    for (std::size_t c = 0; c < op.size(); ++c) {
        const std::size_t i = op.cells()[c];
        std::size_t j = 0;
        for (int k = 0; k < d; ++k)
            j += ((i / st.s[k]) % static_cast<std::size_t>(dims[k]) + 1) * pst.s[k];
        x[static_cast<Eigen::Index>(c)] = std::sqrt(static_cast<double>(sq[j]));
    }
    x.normalize();

    Eigen::VectorXd ax(x.size()), y(x.size());
    std::ostringstream trace;
    double sigma = 0.0;
    for (int it = 0; it <= opt.max_iter; ++it) {
        op.apply(x, ax, 0.0);
        const double theta = x.dot(ax);
        const double rnorm = (ax - theta * x).norm();
        res.lambda = theta;
        res.residual = rnorm / theta;
        res.iterations = it;
        trace << ' ' << theta;
        if (res.residual <= opt.tol) return res;
        if (it == opt.max_iter) break;
        // theta >= lambda_1 always; past the first few steps shift towards it.
        if (it >= 3) sigma = std::max(sigma, std::min(0.9 * theta, theta - rnorm));
        const double eta = std::clamp(0.05 * res.residual, 1e-12, 1e-2);
        while (true) {
            y = x / std::max(theta - sigma, 1e-300);
            const auto cg = conjugate_gradient(op, sigma, x, y, eta, 20000);
            res.cg_iterations += cg.iterations;
            if (!cg.indefinite) break;
            sigma *= 0.5;
        }
        x = y.normalized();
    }
    throw EigenError("eigenvalue: no convergence; Rayleigh quotients:" + trace.str());
}

}  // namespace

std::vector<std::uint8_t> erode(std::span<const std::uint8_t> mask, std::span<const int> dims) {
    const Strides st(dims);
    std::vector<std::uint8_t> out(mask.begin(), mask.end());
    for (std::size_t i = 0; i < st.total; ++i) {
        if (!mask[i]) continue;
        face_neighbours(i, dims, st, [&](std::size_t j) {
            if (j == std::string::npos || !mask[j]) out[i] = 0;
        });
    }
    return out;
}

std::vector<std::uint8_t> dilate(std::span<const std::uint8_t> mask, std::span<const int> dims) {
    const Strides st(dims);
    std::vector<std::uint8_t> out(mask.begin(), mask.end());
    for (std::size_t i = 0; i < st.total; ++i) {
        if (!mask[i]) continue;
        face_neighbours(i, dims, st, [&](std::size_t j) {
            if (j != std::string::npos) out[j] = 1;
        });
    }
    return out;
}

EigenResult dirichlet_eigenvalue(std::span<const std::uint8_t> mask, std::span<const int> dims,
                                 double h, const EigenOptions& opt) {
    if (!(h > 0.0)) throw std::invalid_argument("eigenvalue: cell side must be positive");
    const Strides st(dims);
    if (mask.size() != st.total) throw std::invalid_argument("eigenvalue: mask size mismatch");
    EigenResult res = solve(mask, dims, h, opt);
    if (opt.shell_bracket && !res.single_cell) {
        // Dilate inside a box grown by one cell on every side.
        std::vector<int> pdims(dims.begin(), dims.end());
        for (int& v : pdims) v += 2;
        const Strides pst(pdims);
        std::vector<std::uint8_t> padded(pst.total, 0);
        for (std::size_t i = 0; i < st.total; ++i) {
            if (!mask[i]) continue;
            std::size_t j = 0;
            for (std::size_t k = 0; k < dims.size(); ++k)
                j += ((i / st.s[k]) % static_cast<std::size_t>(dims[k]) + 1) * pst.s[k];
            padded[j] = 1;
        }
        res.shell_lo = solve(dilate(padded, pdims), pdims, h, opt).lambda;
        const auto eroded = erode(mask, dims);
        if (std::any_of(eroded.begin(), eroded.end(), [](std::uint8_t v) { return v != 0; }))
            res.shell_hi = solve(eroded, dims, h, opt).lambda;
        else
            res.shell_hi = 0.5 * static_cast<double>(dims.size()) * M_PI * M_PI / (h * h);
    }
    return res;
}

BoxMask ball_mask(int d, double radius, double h) {
    BoxMask b;
    b.h = h;
    const int m = static_cast<int>(std::ceil(2.0 * radius / h - 1e-9)) + 2;
    b.dims.assign(static_cast<std::size_t>(d), m);
    const Strides st(b.dims);
    b.mask.assign(st.total, 0);
    const double half = 0.5 * m * h;
    for (std::size_t i = 0; i < st.total; ++i) {
        double r2 = 0.0;
        std::size_t rest = i;
        for (int k = 0; k < d; ++k) {
            const double c = (static_cast<double>(rest % m) + 0.5) * h - half;
            rest /= m;
            r2 += c * c;
        }
        b.mask[i] = r2 <= radius * radius * (1.0 + 1e-12) ? 1 : 0;
    }
    return b;
}

BoxMask cube_mask(int d, double side, double h) {
    BoxMask b;
    b.h = h;
    const int m = static_cast<int>(std::ceil(side / h - 1e-9)) + 2;
    b.dims.assign(static_cast<std::size_t>(d), m);
    const Strides st(b.dims);
    b.mask.assign(st.total, 0);
    const double half = 0.5 * m * h;
    const double lim = 0.5 * side * (1.0 + 1e-12);
    for (std::size_t i = 0; i < st.total; ++i) {
        bool in = true;
        std::size_t rest = i;
        for (int k = 0; k < d; ++k) {
            const double c = (static_cast<double>(rest % m) + 0.5) * h - half;
            rest /= m;
            if (std::abs(c) > lim) in = false;
        }
        b.mask[i] = in ? 1 : 0;
    }
    return b;
}

}  // namespace vacant
