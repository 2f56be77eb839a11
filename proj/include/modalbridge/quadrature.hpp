#pragma once

#include <functional>
#include <vector>

namespace modalbridge::quadrature {

/// Nodes and weights on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Jacobi rule by the Golub-Welsch eigenvalue method. Rules are cached per
/// (n, alpha, beta); the returned reference stays valid for the process lifetime.
const Rule& gauss_jacobi(int n, double alpha, double beta);

inline const Rule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// ∫_a^b f(x) dx with an n-point Gauss-Legendre rule.
double legendre(const std::function<double(double)>& f, double a, double b, int n = 10);

/// ∫_a^b (x - a)^p f(x) dx with the Jacobi weight absorbing the left endpoint factor.
double left_weighted(const std::function<double(double)>& f, double a, double b, double p, int n = 20);

/// ∫_a^b (b - x)^q f(x) dx with the Jacobi weight absorbing the right endpoint factor.
double right_weighted(const std::function<double(double)>& f, double a, double b, double q, int n = 20);

/// Adaptive bisection on a smooth integrand: compares the n- and 2n-point
/// Gauss-Legendre estimates and splits until they agree to abs_tol.
double adaptive_legendre(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10,
                         int max_depth = 40);

}  // namespace modalbridge::quadrature
