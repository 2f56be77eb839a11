#pragma once

#include <Eigen/Core>
#include <vector>

#include "modalbridge/driftspec.hpp"
#include "modalbridge/fbm_kernel.hpp"

namespace modalbridge::bridge {

/// Gaussian vector with some coordinates observed.
struct GaussianConditioner {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::vector<int> observed_indices;
    Eigen::VectorXd observed_values;
};

struct ConditionedGaussian {
    std::vector<int> free_indices;  // coordinates of mean/cov below, in increasing order
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd gain;  // Σ_XY Σ_YY^-1, so mean = μ_X + gain (y - μ_Y)
};

/// Conditional law of the unobserved block given the observed one. Σ_YY is factorised with the
/// same jitter policy as the kernel covariances; failure throws ConditioningError.
ConditionedGaussian condition_gaussian(const GaussianConditioner& g);

struct CovBlocks {
    Eigen::Matrix2d sigma_T;
    std::vector<Eigen::Matrix2d> sigma_tT;  // one per grid node
};

/// ∫_0^{t_i} K_H(T, s) ds at every node, from per-cell quadrature. Cached per (n, H, T).
std::vector<double> kernel_partial_row(const fbm::TimeGrid& grid, const fbm::Hurst& hurst);

CovBlocks cov_blocks(const drift::ModelSpec& model, const fbm::TimeGrid& grid);

struct ModalCoeffs {
    std::vector<double> m11, m12, m21, m22;
};

ModalCoeffs modal_coeffs(const drift::ModelSpec& model, const fbm::TimeGrid& grid);

struct ModalPath {
    fbm::TimeGrid grid;
    ModalCoeffs coeffs;
    std::vector<double> x_path;
    std::vector<double> y_path;
    double x = 0.0;
    double y = 0.0;
};

ModalPath modal_path(const drift::ModelSpec& model, const fbm::TimeGrid& grid, double x, double y);

}  // namespace modalbridge::bridge
