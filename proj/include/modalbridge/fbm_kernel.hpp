#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

namespace modalbridge::fbm {

/// Hurst exponent with the constants derived from it.
///
/// c_H = [2H Γ(3/2-H) / (Γ(2-2H) Γ(H+1/2))]^(1/2) normalises the Volterra kernel and
/// kappa_H = c_H B(3/2-H, H+1/2) / (H+1/2) is the coefficient of ∫_0^t K_H(t,u) du = kappa_H t^(H+1/2).
class Hurst {
public:
    explicit Hurst(double H);

    double value() const noexcept { return H_; }
    double c() const noexcept { return c_H_; }
    double kappa() const noexcept;
    bool is_brownian() const noexcept { return H_ == 0.5; }

private:
    double H_;
    double c_H_;
    double kappa_H_;
};

/// Uniform grid t_i = i T / n, i = 0..n.
struct TimeGrid {
    double T = 1.0;
    int n = 2;

    TimeGrid() = default;
    TimeGrid(double horizon, int steps);

    double dt() const noexcept { return T / n; }
    double node(int i) const noexcept { return i == n ? T : T * static_cast<double>(i) / n; }
    std::vector<double> nodes() const;
};

/// K_H(t,s) = c_H (t-s)^(H-1/2) F(H-1/2, 1/2-H, H+1/2; 1-t/s) for 0 < s < t.
double kernel_hyp(double t, double s, const Hurst& hurst);

/// K_H(t,s) = c_H [(t/s)^(H-1/2)(t-s)^(H-1/2) - (H-1/2) s^(1/2-H) ∫_s^t u^(H-3/2)(u-s)^(H-1/2) du],
/// with the inner integral done by Gauss-Jacobi quadrature.
double kernel_alt(double t, double s, const Hurst& hurst);

/// fBm covariance R_H(s,t) = (s^2H + t^2H - |t-s|^2H) / 2.
double autocovariance(double s, double t, const Hurst& hurst);

/// ∫_0^t K_H(t,u) du = kappa_H t^(H+1/2).
double kernel_total_integral(double t, const Hurst& hurst);

/// ∫_0^tau K_H(t,u) du by singularity-aware quadrature, 0 <= tau <= t.
double kernel_partial_integral(double tau, double t, const Hurst& hurst);

/// Zeroth and first moments of the kernel over a cell [a, b] ⊆ [0, t]:
/// m0 = ∫_a^b K_H(t,s) ds and m1 = ∫_a^b K_H(t,s) (s - a) ds.
struct CellMoments {
    double m0 = 0.0;
    double m1 = 0.0;
};
CellMoments kernel_cell_moments(double t, double a, double b, const Hurst& hurst);

/// Kernel cell moments for the unit-spaced grid 0, 1, ..., n, i.e. cells [j, j+1] of
/// K_H(k, ·) for 0 <= j < k <= n. Homogeneity K_H(λt, λs) = λ^(H-1/2) K_H(t,s) rescales
/// them to any uniform grid: multiply m0 by dt^(H+1/2) and m1 by dt^(H+3/2).
class KernelCellTable {
public:
    KernelCellTable(int n, const Hurst& hurst);

    int size() const noexcept { return n_; }
    double hurst() const noexcept { return H_; }
    double m0(int k, int j) const { return m0_[index(k, j)]; }
    double m1(int k, int j) const { return m1_[index(k, j)]; }

private:
    static std::size_t index(int k, int j) {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(k - 1) / 2 + static_cast<std::size_t>(j);
    }

    int n_;
    double H_;
    std::vector<double> m0_;
    std::vector<double> m1_;
};

/// Shared, lazily built table for (n, H). Built once per key; concurrent readers share it.
std::shared_ptr<const KernelCellTable> cell_table(int n, const Hurst& hurst);

/// Covariance of (B_{t_1..t_n}, B^H_{t_1..t_n}) in that block order (2n x 2n).
Eigen::MatrixXd joint_cov_matrix(const TimeGrid& grid, const Hurst& hurst);

/// Lower Cholesky factor with diagonal jitter doubling from 1e-14 trace up to 1e-10 trace.
/// Throws ConditioningError if the matrix is still not positive definite.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov);

/// Exact joint samples of (B, B^H) at the grid nodes, including t_0 = 0.
struct JointPaths {
    TimeGrid grid;
    // count x (n+1), row-major by path
    Eigen::MatrixXd brownian;
    Eigen::MatrixXd fractional;
};

JointPaths sample_joint_paths(const TimeGrid& grid, const Hurst& hurst, std::uint64_t seed, int count);

/// Test hook: scales every kappa_H returned by Hurst::kappa(). 1.0 restores normal behaviour.
void set_kappa_fault_factor(double factor) noexcept;

}  // namespace modalbridge::fbm
