#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modalbridge/driftspec.hpp"

namespace modalbridge::mc {

enum class EstimatorKind { Bin, KDE };

/// Rectangle of widths (wx, wy) centred at the point, or a product-Gaussian kernel with bandwidths (wx, wy).
struct Estimator {
    EstimatorKind kind = EstimatorKind::KDE;
    double wx = 0.1;
    double wy = 0.1;
};

struct SimConfig {
    std::int64_t n_paths = 10000;
    int n_steps = 128;
    std::uint64_t seed = 0;
    Estimator estimator;
    int chunk_size = 4096;
    bool keep_paths = false;

    void validate() const;
};

struct PathEnsemble {
    std::vector<double> terminal_x;
    std::vector<double> terminal_y;
    std::vector<double> paths_x;  // n_paths x (n_steps+1), row-major, only with keep_paths
    std::vector<double> paths_y;
    std::uint64_t seed = 0;
    std::string fingerprint;
    std::vector<std::string> warnings;
};

struct DensityEstimate {
    double value = 0.0;
    double std_err = 0.0;
    std::int64_t n_effective = 0;
};

/// Canonical description of a model, used to tag ensembles.
std::string model_fingerprint(const drift::ModelSpec& model);

/// Euler scheme for the system with the fBm term sampled exactly: (B, B^H) jointly from the
/// grid covariance, W independent. Chunk k of config.chunk_size paths draws from stream seed ^ k,
/// so the result does not depend on the number of worker threads.
PathEnsemble simulate_forward(const drift::ModelSpec& model, const SimConfig& config);

/// Bin: hits / (n area) with binomial standard error; with no hits the value is 0 and the
/// standard error is the one-sided 95% bound 3 / (n area). KDE: mean of the product-Gaussian
/// kernel with the sample standard error.
DensityEstimate estimate_density_at(const PathEnsemble& ensemble, double x, double y, const Estimator& estimator);

struct BridgeEstimate {
    double value = 0.0;
    double std_err = 0.0;
    double discretization_bias = 0.0;  // |estimate(n) - estimate(n/2)| with the same seed
    std::int64_t n_paths = 0;
};

/// φ(Δx, Δy) times the bridge-measure expectation of the Girsanov weight, with the terminal
/// constraints imposed on i.i.d. Brownian increments by Gaussian conditioning.
BridgeEstimate bridge_mc_density(const drift::ModelSpec& model, double x, double y, const SimConfig& config);

}  // namespace modalbridge::mc
