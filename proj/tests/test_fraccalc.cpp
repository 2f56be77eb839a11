#include <doctest.h>

#include <cmath>

#include "modalbridge/errors.hpp"
#include "modalbridge/fraccalc.hpp"
#include "modalbridge/quadrature.hpp"

using namespace modalbridge;
using namespace modalbridge::fraccalc;

namespace {

GridFunction sample(int n, double T, const std::function<double(double)>& f) {
    return GridFunction::sample(fbm::TimeGrid(T, n), f);
}

double max_error(const GridFunction& a, const std::function<double(double)>& f, std::size_t from = 0) {
    double e = 0.0;
    for (std::size_t i = from; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - f(a.grid.node(static_cast<int>(i)))));
    return e;
}

}  // namespace

TEST_CASE("grid function validation") {
    const fbm::TimeGrid g(1.0, 4);
    CHECK_THROWS_AS(GridFunction(g, {1, 2, 3}), DomainError);
    CHECK_THROWS_AS(GridFunction(g, {1, 2, 3, std::nan(""), 5}), DomainError);
}

TEST_CASE("Gauss-Jacobi rules integrate weighted polynomials") {
    const auto& r = quadrature::gauss_jacobi(6, -0.3, 0.4);
    double m0 = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) m0 += r.weights[i];
    // ∫ (1-x)^a (1+x)^b dx = 2^(a+b+1) B(a+1, b+1)
    const double exact = std::pow(2.0, 1.1) * std::tgamma(0.7) * std::tgamma(1.4) / std::tgamma(2.1);
    CHECK(m0 == doctest::Approx(exact).epsilon(1e-13));
    CHECK(quadrature::left_weighted([](double x) { return x; }, 0.0, 1.0, -0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("Riemann-Liouville integral") {
    const auto one = sample(200, 2.0, [](double) { return 1.0; });
    CHECK(max_error(rl_integral(one, 1.0), [](double t) { return t; }) < 1e-13);
    for (double mu : {0.0, 1.0, 2.5}) {
        for (double alpha : {0.3, 0.8}) {
            const auto f = sample(400, 1.0, [&](double t) { return std::pow(t, mu); });
            const double c = std::tgamma(mu + 1) / std::tgamma(mu + 1 + alpha);
            CAPTURE(mu);
            CHECK(max_error(rl_integral(f, alpha), [&](double t) { return c * std::pow(t, mu + alpha); }) < 2e-5);
        }
    }
    CHECK_THROWS_AS(rl_integral(one, 1.5), DomainError);
}

TEST_CASE("fractional integrals compose") {
    const auto f = sample(800, 1.0, [](double t) { return t; });
    const auto lhs = rl_integral(rl_integral(f, 0.3), 0.4);
    const auto rhs = rl_integral(f, 0.7);
    double e = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) e = std::max(e, std::abs(lhs[i] - rhs[i]));
    CHECK(e < 1e-4);
}

TEST_CASE("weighted fractional integral against closed form") {
    // (1/Γ(α)) ∫ (t-s)^(α-1) s^p ds = Γ(p+1)/Γ(p+1+α) t^(p+α)
    for (double p : {-0.4, 0.0, 0.6}) {
        const double alpha = 0.35;
        const auto one = sample(500, 1.0, [](double) { return 1.0; });
        const double c = std::tgamma(p + 1) / std::tgamma(p + 1 + alpha);
        CAPTURE(p);
        CHECK(max_error(weighted_rl_integral(one, alpha, p), [&](double t) { return c * std::pow(t, p + alpha); }, 10) < 1e-10);
    }
}

TEST_CASE("Weyl derivative") {
    const double alpha = 0.4;
    const auto pw = sample(1000, 1.0, [&](double t) { return std::pow(t, alpha); });
    CHECK(max_error(weyl_derivative(pw, alpha), [&](double) { return std::tgamma(alpha + 1); }, 20) < 5e-3);
    const auto c = sample(500, 1.0, [](double) { return 2.0; });
    CHECK(max_error(weyl_derivative(c, alpha), [&](double t) { return 2.0 * std::pow(t, -alpha) / std::tgamma(1 - alpha); }, 1) <
          1e-10);
    const auto f = sample(2000, 1.0, [](double t) { return std::cos(t); });
    CHECK(max_error(weyl_derivative(rl_integral(f, alpha), alpha), [](double t) { return std::cos(t); }, 40) < 1e-3);
}

TEST_CASE("forward operator") {
    for (double H : {0.2, 0.5, 0.8}) {
        const fbm::Hurst h(H);
        const auto one = sample(500, 1.5, [](double) { return 1.0; });
        CAPTURE(H);
        CHECK(max_error(apply_KH(one, h), [&](double t) { return h.kappa() * std::pow(t, H + 0.5); }) < 1e-10);
    }
    const auto lin = sample(300, 1.0, [](double t) { return t; });
    CHECK(max_error(apply_KH(lin, fbm::Hurst(0.5)), [](double t) { return t * t / 2; }) < 1e-14);
}

TEST_CASE("factored and direct forward operators agree") {
    for (double H : {0.3, 0.7}) {
        const fbm::Hurst h(H);
        const auto f = sample(1000, 1.0, [](double t) { return std::sin(t); });
        const auto a = apply_KH(f, h);
        const auto b = apply_KH_factored(f, h);
        double e = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
        CAPTURE(H);
        CHECK(e < 1e-5);
    }
}

TEST_CASE("inverse operator") {
    for (double H : {0.25, 0.75}) {
        const fbm::Hurst h(H);
        const auto g = sample(1000, 1.0, [&](double t) { return h.kappa() * std::pow(t, H + 0.5); });
        CAPTURE(H);
        CHECK(max_error(invert_KH(g, h), [](double) { return 1.0; }, 20) < 1e-6);
    }
    const auto sq = sample(400, 1.0, [](double t) { return t * t / 2; });
    CHECK(max_error(invert_KH(sq, fbm::Hurst(0.5)), [](double t) { return t; }) < 1e-12);
}

TEST_CASE("round trip converges under refinement") {
    for (double H : {0.25, 0.75}) {
        const fbm::Hurst h(H);
        auto err = [&](int n) {
            const auto f = sample(n, 1.0, [](double t) { return std::exp(t); });
            const auto back = invert_KH(apply_KH(f, h), h);
            return max_error(back, [](double t) { return std::exp(t); }, static_cast<std::size_t>(n / 50));
        };
        const double e1 = err(400), e2 = err(800);
        CAPTURE(H);
        CHECK(e1 < 1e-3);
        CHECK(e1 / e2 > 1.5);
    }
}

TEST_CASE("inverse from a known derivative") {
    // K_H f = t  means f = K_H^-1 applied to h' = 1.
    const fbm::Hurst h(0.3);
    const auto one = sample(800, 1.0, [](double) { return 1.0; });
    const auto f = invert_KH_from_derivative(one, h);
    const auto back = apply_KH(f, h);
    CHECK(max_error(back, [](double t) { return t; }, 16) < 1e-3);
}

TEST_CASE("inverse operator input checks") {
    const auto bad = sample(100, 1.0, [](double t) { return 1.0 + t; });
    CHECK_THROWS_AS(invert_KH(bad, fbm::Hurst(0.3)), DomainError);
    const auto ok = sample(100, 1.0, [](double t) { return t; });
    CHECK_THROWS_AS(invert_KH(ok, fbm::Hurst(0.97)), UnsupportedError);
}

TEST_CASE("finite differences are second order") {
    auto err = [](int n) {
        const auto f = sample(n, 1.0, [](double t) { return std::sin(3 * t); });
        return max_error(differentiate(f), [](double t) { return 3 * std::cos(3 * t); });
    };
    CHECK(err(100) / err(200) > 3.5);
}
