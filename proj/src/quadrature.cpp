#include "modalbridge/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "modalbridge/errors.hpp"
#include "modalbridge/specialfn.hpp"

namespace modalbridge::quadrature {

namespace {

Rule build_jacobi(int n, double alpha, double beta) {
    // Monic three-term recurrence for the Jacobi polynomials.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        double diag;
        if (k == 0)
            diag = (beta - alpha) / (ab + 2.0);
        else
            diag = (beta * beta - alpha * alpha) / ((2.0 * kk + ab) * (2.0 * kk + ab + 2.0));
        jac(k, k) = diag;
        if (k + 1 < n) {
            const double m = kk + 1.0;
            double off2;
            if (k == 0)
                off2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
            else
                off2 = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) /
                       ((2.0 * m + ab) * (2.0 * m + ab) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0));
            jac(k, k + 1) = jac(k + 1, k) = std::sqrt(off2);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + specialfn::lgamma_fn(alpha + 1.0) +
                                specialfn::lgamma_fn(beta + 1.0) - specialfn::lgamma_fn(ab + 2.0));
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = eig.eigenvalues()(i);
        const double v = eig.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v * v;
    }
    return rule;
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double whole, double tol,
                     int depth) {
    const double mid = 0.5 * (a + b);
    const double left = legendre(f, a, mid, 10);
    const double right = legendre(f, mid, b, 10);
    const double refined = left + right;
    if (std::abs(refined - whole) <= tol || depth <= 0) return refined;
    return adaptive_step(f, a, mid, left, 0.5 * tol, depth - 1) + adaptive_step(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

const Rule& gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw DomainError("gauss_jacobi: need at least one node");
    if (!(alpha > -1.0) || !(beta > -1.0)) throw DomainError("gauss_jacobi: exponents must exceed -1");
    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, std::unique_ptr<Rule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n, alpha, beta}];
    if (!slot) slot = std::make_unique<Rule>(build_jacobi(n, alpha, beta));
    return *slot;
}

double legendre(const std::function<double(double)>& f, double a, double b, int n) {
    const Rule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

double left_weighted(const std::function<double(double)>& f, double a, double b, double p, int n) {
    const Rule& rule = gauss_jacobi(n, 0.0, p);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(a + half * (1.0 + rule.nodes[i]));
    return std::pow(half, p + 1.0) * sum;
}

double right_weighted(const std::function<double(double)>& f, double a, double b, double q, int n) {
    const Rule& rule = gauss_jacobi(n, q, 0.0);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(b - half * (1.0 - rule.nodes[i]));
    return std::pow(half, q + 1.0) * sum;
}

double adaptive_legendre(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    return adaptive_step(f, a, b, legendre(f, a, b, 10), abs_tol, max_depth);
}

}  // namespace modalbridge::quadrature
