#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "vacant/geometry.hpp"

namespace vacant {

/// Non-periodic rectangular index grid in d dimensions, axis 0 fastest.
class BoxGrid {
  public:
    BoxGrid(const IVec& origin, const IVec& dims) : origin_(origin), dims_(dims) {
        strides_.resize(dims.size());
        std::size_t s = 1;
        for (Eigen::Index k = 0; k < dims.size(); ++k) {
            strides_[k] = s;
            s *= static_cast<std::size_t>(dims[k]);
        }
        size_ = s;
    }

    int dim() const { return static_cast<int>(dims_.size()); }
    std::size_t size() const { return size_; }
    const IVec& origin() const { return origin_; }
    const IVec& dims() const { return dims_; }

    bool inside(const IVec& p) const {
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const int l = p[k] - origin_[k];
            if (l < 0 || l >= dims_[k]) return false;
        }
        return true;
    }
    std::size_t index(const IVec& p) const {
        std::size_t i = 0;
        for (Eigen::Index k = 0; k < p.size(); ++k)
            i += static_cast<std::size_t>(p[k] - origin_[k]) * strides_[k];
        return i;
    }
    IVec point(std::size_t i) const {
        IVec p(dims_.size());
        for (Eigen::Index k = 0; k < dims_.size(); ++k) {
            p[k] = origin_[k] + static_cast<int>(i % static_cast<std::size_t>(dims_[k]));
            i /= static_cast<std::size_t>(dims_[k]);
        }
        return p;
    }

    /// Calls fn(j) for each in-box neighbour of cell i; face neighbours only
    /// (2d) or all 3^d - 1 neighbours.
    template <class Fn>
    void for_each_neighbour(std::size_t i, bool face_only, Fn&& fn) const {
        const IVec p = point(i);
        const int d = dim();
        if (face_only) {
            for (int k = 0; k < d; ++k) {
                const int l = p[k] - origin_[k];
                if (l > 0) fn(i - strides_[k]);
                if (l + 1 < dims_[k]) fn(i + strides_[k]);
            }
            return;
        }
        IVec off = IVec::Constant(d, -1);
        while (true) {
            bool zero = true, ok = true;
            for (int k = 0; k < d; ++k) {
                if (off[k] != 0) zero = false;
                const int l = p[k] - origin_[k] + off[k];
                if (l < 0 || l >= dims_[k]) ok = false;
            }
            if (!zero && ok) {
                std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i);
                for (int k = 0; k < d; ++k) j += off[k] * static_cast<std::ptrdiff_t>(strides_[k]);
                fn(static_cast<std::size_t>(j));
            }
            int k = 0;
            while (k < d && off[k] == 1) off[k++] = -1;
            if (k == d) break;
            ++off[k];
        }
    }

    /// Connected-component labels of cells with mask[i] == value; other cells
    /// get -1. Returns the number of components.
    int label(const std::vector<std::uint8_t>& mask, std::uint8_t value, bool face_only,
              std::vector<int>& labels) const {
        labels.assign(size_, -1);
        int next = 0;
        std::deque<std::size_t> queue;
        for (std::size_t s = 0; s < size_; ++s) {
            if (mask[s] != value || labels[s] >= 0) continue;
            labels[s] = next;
            queue.push_back(s);
            while (!queue.empty()) {
                const std::size_t c = queue.front();
                queue.pop_front();
                for_each_neighbour(c, face_only, [&](std::size_t j) {
                    if (mask[j] == value && labels[j] < 0) {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                });
            }
            ++next;
        }
        return next;
    }

  private:
    IVec origin_;
    IVec dims_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

}  // namespace vacant
