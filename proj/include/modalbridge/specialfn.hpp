#pragma once

namespace modalbridge::specialfn {

/// Truncation controls for the series evaluations in this module.
struct PrecisionPolicy {
    double abs_tol = 1e-12;
    int max_terms = 10000;

    void validate() const;
};

/// Gamma function for x > 0 (Lanczos, g = 7). Throws DomainError for x <= 0.
double gamma_fn(double x);

/// Natural log of the gamma function for x > 0.
double lgamma_fn(double x);

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b) for a, b > 0.
double beta_fn(double a, double b);

/// Gauss hypergeometric function F(a, b; c; z) restricted to z <= 0.
///
/// The argument is mapped into [0, 1) with the Pfaff transformation
/// F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1)) and the series is summed there.
/// When the mapped argument is close to 1 the linear transformation to 1 - w is
/// used instead, unless the parameter excess is (nearly) an integer.
double hyp2f1(double a, double b, double c, double z, const PrecisionPolicy& policy = {});

namespace detail {

/// Γ(x) on the whole real line except the poles (reflection for x < 1/2).
double gamma_any(double x);

/// 1/Γ(x), returning exactly 0 at the poles x = 0, -1, -2, ...
double rgamma(double x);

/// Plain power series sum_k (a)_k (b)_k / ((c)_k k!) w^k for 0 <= w < 1.
double hyp2f1_series(double a, double b, double c, double w, const PrecisionPolicy& policy);

}  // namespace detail

}  // namespace modalbridge::specialfn
