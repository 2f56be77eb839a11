#pragma once

#include <functional>
#include <vector>

#include "modalbridge/fbm_kernel.hpp"

namespace modalbridge::fraccalc {

/// Largest Hurst exponent accepted by the inverse operator.
inline constexpr double kMaxInvertHurst = 0.95;

/// Values f(t_0), ..., f(t_n) on a uniform grid.
struct GridFunction {
    fbm::TimeGrid grid;
    std::vector<double> values;

    GridFunction(const fbm::TimeGrid& g, std::vector<double> v);

    static GridFunction sample(const fbm::TimeGrid& g, const std::function<double(double)>& f);

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// I^alpha f(t) = (1/Γ(alpha)) ∫_0^t (t-s)^(alpha-1) f(s) ds for alpha in (0, 1], with
/// product-integration weights that are exact for the piecewise-linear interpolant of f.
GridFunction rl_integral(const GridFunction& f, double alpha);

/// (1/Γ(alpha)) ∫_0^t (t-s)^(alpha-1) s^p f(s) ds for alpha > 0, p > -1, exact for
/// piecewise-linear f. When alpha + p < 0 the value at t = 0 is extrapolated.
GridFunction weighted_rl_integral(const GridFunction& f, double alpha, double p);

/// Weyl derivative D^alpha f(t) = (1/Γ(1-alpha)) [f(t) t^-alpha + alpha ∫_0^t (f(t)-f(s)) (t-s)^(-alpha-1) ds],
/// alpha in (0, 1). The value at t = 0 is extrapolated from the next two nodes.
GridFunction weyl_derivative(const GridFunction& f, double alpha);

/// (K_H f)(t) = ∫_0^t K_H(t,s) f(s) ds. H = 1/2 is the trapezoidal running integral.
GridFunction apply_KH(const GridFunction& f, const fbm::Hurst& hurst);

/// K_H f through its factorisation into fractional integrals:
///   H <= 1/2:  c_H Γ(H+1/2) I^(2H) u^(1/2-H) I^(1/2-H) u^(H-1/2) f
///   H >  1/2:  c_H Γ(H+1/2) I^1 u^(H-1/2) I^(H-1/2) u^(1/2-H) f
GridFunction apply_KH_factored(const GridFunction& f, const fbm::Hurst& hurst);

/// K_H^-1 h for h(0) = 0, with h' recovered by central differences.
GridFunction invert_KH(const GridFunction& h, const fbm::Hurst& hurst);

/// K_H^-1 h given h' directly (preferred when the integrand is known).
///   H < 1/2:  (c_H Γ(H+1/2))^-1 t^(H-1/2) I^(1/2-H) s^(1/2-H) h'
///   H > 1/2:  (c_H Γ(H+1/2) Γ(3/2-H))^-1 (a(t) + b(t))
/// The value at t = 0 is extrapolated when the formula is singular there.
GridFunction invert_KH_from_derivative(const GridFunction& h_prime, const fbm::Hurst& hurst);

/// Second-order finite-difference derivative (central inside, one-sided at the ends).
GridFunction differentiate(const GridFunction& h);

}  // namespace modalbridge::fraccalc
