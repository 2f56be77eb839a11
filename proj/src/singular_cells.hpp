#pragma once

// Product-integration cell moments for kernels k(t, s) on 0 <= s <= t that are smooth
// in the interior and have algebraic singularities at s = 0 and/or s = t.
//
// A kernel type supplies
//   double value(double t, double s) const;                          interior evaluation
//   CellMoments left_block(double t, double b, double ref) const;    ∫_0^b, b <= t/2
//   CellMoments right_block(double t, double a, double ref) const;   ∫_a^t, a >= t/2
// where every block returns (∫ k ds, ∫ k (s - ref) ds).

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "modalbridge/fbm_kernel.hpp"
#include "modalbridge/parallel.hpp"
#include "modalbridge/quadrature.hpp"

namespace modalbridge::detail {

using fbm::CellMoments;

inline CellMoments operator+(CellMoments x, CellMoments y) { return {x.m0 + y.m0, x.m1 + y.m1}; }
inline CellMoments operator-(CellMoments x, CellMoments y) { return {x.m0 - y.m0, x.m1 - y.m1}; }

template <class Kernel>
CellMoments smooth_block(const Kernel& kernel, double t, double a, double b, double ref, int points) {
    const auto& rule = quadrature::gauss_legendre(points);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    CellMoments out;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = mid + half * rule.nodes[i];
        const double g = rule.weights[i] * kernel.value(t, s);
        out.m0 += g;
        out.m1 += g * (s - ref);
    }
    out.m0 *= half;
    out.m1 *= half;
    return out;
}

/// ∫_a^b k(t,s) (1, s - ref) ds. Interior panels are used only when their width does
/// not exceed the distance to the nearest singular endpoint, which keeps the
/// Gauss-Legendre error near machine precision.
template <class Kernel>
CellMoments singular_moments(const Kernel& kernel, double t, double a, double b, double ref) {
    const double mid = 0.5 * t;
    if (a >= b) return {};
    if (a <= 0.0) {
        if (b <= mid) return kernel.left_block(t, b, ref);
        return kernel.left_block(t, mid, ref) + singular_moments(kernel, t, mid, b, ref);
    }
    if (b >= t) {
        if (a >= mid) return kernel.right_block(t, a, ref);
        return singular_moments(kernel, t, a, mid, ref) + kernel.right_block(t, mid, ref);
    }
    const double width = b - a;
    const double clearance = std::min(a, t - b);
    if (4.0 * width <= clearance) return smooth_block(kernel, t, a, b, ref, 6);
    if (width <= clearance) return smooth_block(kernel, t, a, b, ref, 10);
    if (a >= mid && t - b < width) return kernel.right_block(t, a, ref) - kernel.right_block(t, b, ref);
    if (b <= mid && a < width) return kernel.left_block(t, b, ref) - kernel.left_block(t, a, ref);
    const double split = 0.5 * (a + b);
    return singular_moments(kernel, t, a, split, ref) + singular_moments(kernel, t, split, b, ref);
}

/// Packed lower-triangular table of unit-grid cell moments: entry (k, j) holds the
/// moments of k(k, ·) over [j, j+1] relative to j, for 0 <= j < k <= n.
class UnitCellTable {
public:
    template <class Kernel>
    UnitCellTable(int n, const Kernel& kernel) : n_(n) {
        const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
        m0_.assign(total, 0.0);
        m1_.assign(total, 0.0);
        parallel_for(1, n + 1, [&](std::int64_t kk) {
            const int k = static_cast<int>(kk);
            const double t = static_cast<double>(k);
            for (int j = 0; j < k; ++j) {
                const double a = static_cast<double>(j);
                const CellMoments mom = singular_moments(kernel, t, a, a + 1.0, a);
                m0_[index(k, j)] = mom.m0;
                m1_[index(k, j)] = mom.m1;
            }
        });
    }

    int size() const noexcept { return n_; }
    double m0(int k, int j) const { return m0_[index(k, j)]; }
    double m1(int k, int j) const { return m1_[index(k, j)]; }

    /// Weighted sum Σ_j [f_j (m0 - m1) + f_{j+1} m1] over the cells of row k, i.e. the
    /// unit-grid integral of k(k, ·) against the piecewise-linear interpolant of f.
    template <class Values>
    double apply_row(int k, const Values& f) const {
        double sum = 0.0;
        const std::size_t base = index(k, 0);
        for (int j = 0; j < k; ++j) {
            const double a0 = m0_[base + static_cast<std::size_t>(j)];
            const double a1 = m1_[base + static_cast<std::size_t>(j)];
            sum += f[static_cast<std::size_t>(j)] * (a0 - a1) + f[static_cast<std::size_t>(j) + 1] * a1;
        }
        return sum;
    }

private:
    static std::size_t index(int k, int j) {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(k - 1) / 2 + static_cast<std::size_t>(j);
    }

    int n_;
    std::vector<double> m0_;
    std::vector<double> m1_;
};

/// Small bounded cache of tables keyed by n and up to two kernel parameters.
template <class Table>
class TableCache {
public:
    using Key = std::tuple<int, double, double>;

    template <class Build>
    std::shared_ptr<const Table> get(const Key& key, Build&& build) {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        std::shared_ptr<const Table> table = build();
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        if (order_.size() >= kMaxEntries) {
            cache_.erase(order_.front());
            order_.erase(order_.begin());
        }
        cache_.emplace(key, table);
        order_.push_back(key);
        return table;
    }

private:
    static constexpr std::size_t kMaxEntries = 6;
    std::mutex mutex_;
    std::map<Key, std::shared_ptr<const Table>> cache_;
    std::vector<Key> order_;
};

}  // namespace modalbridge::detail
