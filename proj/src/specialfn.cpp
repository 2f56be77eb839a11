#include "modalbridge/specialfn.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "modalbridge/errors.hpp"

namespace modalbridge::specialfn {

namespace {

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double xm1) {
    double sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (xm1 + static_cast<double>(i));
    return sum;
}

// Γ(x) for x >= 1/2.
double gamma_right(double x) {
    const double xm1 = x - 1.0;
    const double t = xm1 + kLanczosG + 0.5;
    if (x > 140.0) {
        // Split the power to avoid overflow before the exponential damps it.
        const double half = std::pow(t, 0.5 * (xm1 + 0.5));
        return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * lanczos_sum(xm1);
    }
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, xm1 + 0.5) * std::exp(-t) * lanczos_sum(xm1);
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

}  // namespace

void PrecisionPolicy::validate() const {
    if (!(abs_tol > 0.0)) throw DomainError("PrecisionPolicy.abs_tol must be positive");
    if (max_terms < 1) throw DomainError("PrecisionPolicy.max_terms must be at least 1");
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive, got " + std::to_string(x));
    if (x == 1.0 || x == 2.0) return 1.0;
    return detail::gamma_any(x);
}

double lgamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("lgamma_fn: argument must be positive, got " + std::to_string(x));
    if (x < 0.5) return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lgamma_fn(1.0 - x);
    const double xm1 = x - 1.0;
    const double t = xm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1));
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("beta_fn: arguments must be positive, got (" + std::to_string(a) + ", " +
                          std::to_string(b) + ")");
    if (a + b < 140.0) return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
    return std::exp(lgamma_fn(a) + lgamma_fn(b) - lgamma_fn(a + b));
}

namespace detail {

double gamma_any(double x) {
    if (is_nonpositive_integer(x)) throw DomainError("gamma: pole at " + std::to_string(x));
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_right(1.0 - x));
    return gamma_right(x);
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / gamma_any(x);
}

double hyp2f1_series(double a, double b, double c, double w, const PrecisionPolicy& policy) {
    double term = 1.0;
    double sum = 1.0;
    // Geometric tail bound: the remainder after a term of size r is about r*w/(1-w).
    const double tail = policy.abs_tol * (1.0 - w);
    for (int k = 0; k < policy.max_terms; ++k) {
        const double kk = static_cast<double>(k);
        term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * w;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= tail * std::abs(sum) && k > 2) return sum;
    }
    throw DomainError("hyp2f1: series did not converge within max_terms at w = " + std::to_string(w));
}

}  // namespace detail

double hyp2f1(double a, double b, double c, double z, const PrecisionPolicy& policy) {
    policy.validate();
    if (!(z <= 0.0)) throw DomainError("hyp2f1: argument z must be <= 0, got " + std::to_string(z));
    if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c must not be a nonpositive integer");
    if (a == 0.0 || b == 0.0 || z == 0.0) return 1.0;

    // Pfaff: F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; w), w = z/(z-1) in [0, 1).
    const double one_minus_z = 1.0 - z;
    const double w = z / (z - 1.0);
    const double one_minus_w = 1.0 / one_minus_z;
    const double bp = c - b;
    const double prefactor = std::pow(one_minus_z, -a);
    if (bp == 0.0) return prefactor;

    const double excess = c - a - bp;  // exponent of (1-w) in the connection formula
    const bool integer_excess = std::abs(excess - std::nearbyint(excess)) < 1e-6;
    if (w <= 0.75 || integer_excess) return prefactor * detail::hyp2f1_series(a, bp, c, w, policy);

    // F(a,b';c;w) = Γ(c)Γ(e)/(Γ(c-a)Γ(c-b')) F(a,b';1-e;1-w)
    //             + (1-w)^e Γ(c)Γ(-e)/(Γ(a)Γ(b')) F(c-a,c-b';1+e;1-w)
    using detail::gamma_any;
    using detail::rgamma;
    const double gc = gamma_any(c);
    const double first = gc * gamma_any(excess) * rgamma(c - a) * rgamma(c - bp) *
                         detail::hyp2f1_series(a, bp, 1.0 - excess, one_minus_w, policy);
    const double second = std::pow(one_minus_w, excess) * gc * gamma_any(-excess) * rgamma(a) * rgamma(bp) *
                          detail::hyp2f1_series(c - a, c - bp, 1.0 + excess, one_minus_w, policy);
    return prefactor * (first + second);
}

}  // namespace modalbridge::specialfn
