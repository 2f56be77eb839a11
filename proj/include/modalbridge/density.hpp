#pragma once

#include "modalbridge/bridge.hpp"
#include "modalbridge/driftspec.hpp"
#include "modalbridge/fraccalc.hpp"

namespace modalbridge::density {

/// Bivariate normal density of (X_T - x0, Y_T - y0) under the drift-free measure, covariance Σ(T).
double gaussian_prefactor(double dx, double dy, const drift::ModelSpec& model);

/// Drifts along the modal path and the solutions of the ĥ system; brackets are ∫_0^T by trapezoid.
struct DriftFunctionals {
    fraccalc::GridFunction bar_h1;
    fraccalc::GridFunction bar_h2;
    fraccalc::GridFunction hat_h1;
    fraccalc::GridFunction hat_h2;
    double int_bar_h1 = 0.0;
    double int_bar_h2 = 0.0;
    double int_hat_h1 = 0.0;
    double int_hat_h2 = 0.0;
    double int_hat_h1_sq = 0.0;
    double int_hat_h2_sq = 0.0;
};

DriftFunctionals drift_functionals(const drift::ModelSpec& model, const bridge::ModalPath& path);

/// m'Σ(T)^-1 Δ - ½ m'Σ(T)^-1 m with m = (ρ̄⟨ĥ1⟩ + ρ⟨ĥ2⟩, ⟨h̄2⟩) and Δ = (x - x0, y - y0).
double omega_full(const DriftFunctionals& f, const drift::ModelSpec& model, double x, double y);

/// The part of omega_full that is linear in Δ.
double omega_1(const DriftFunctionals& f, const drift::ModelSpec& model, double x, double y);

/// Order of the remainder in T: 2H for H <= 1/2; 3 - 4H (General) or 2 - 2H (Linear) above.
/// TimeOnly drifts give +infinity. General drifts with H >= 3/4 throw UnsupportedError.
double alpha_exponent(const drift::ModelSpec& model);

struct DensityApprox {
    double phi = 0.0;
    double omega_full = 0.0;
    double omega_1 = 0.0;
    double alpha = 0.0;
    double p_hat = 0.0;       // phi exp(omega_1)
    double p_hat_full = 0.0;  // phi exp(omega_full)
};

DensityApprox approx_density(const drift::ModelSpec& model, double x, double y, int n);

}  // namespace modalbridge::density
