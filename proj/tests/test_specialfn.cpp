#include <doctest.h>

#include <cmath>
#include <numbers>

#include "modalbridge/errors.hpp"
#include "modalbridge/specialfn.hpp"

using namespace modalbridge;
using namespace modalbridge::specialfn;

namespace {

// Reference values from 30-digit arbitrary-precision evaluations.
struct GammaCase {
    double x, value;
};
constexpr GammaCase kGamma[] = {
    {0.01, 99.432585119150603714}, {0.5, 1.7724538509055160273},  {1.7, 0.90863873285329044998},
    {3.25, 2.5492569667185292818}, {12.5, 136843365.46556585726}, {40.2, 4.2572223092576738485e+46},
};

struct HypCase {
    double a, b, c, z, value;
};
constexpr HypCase kHyp[] = {
    {-0.2, 0.2, 0.7, -0.5, 1.0252998830362781323},
    {0.3, -0.3, 0.8, -3, 1.2195916493323446183},
    {0.25, -0.25, 0.75, -99, 2.0480508516352817465},
    {-0.45, 0.45, 0.05, -1e4, 376.16701154003533953},
    {0.4, -0.4, 0.9, -0.999, 1.1496407525056292666},
    {0.5, 1, 1.5, -7, 0.45712127131160404093},
    {0.3, 0.7, 2.0, -50, 0.49570474672547359471},
};

}  // namespace

TEST_CASE("gamma at reference points") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(gamma_fn(0.75) == doctest::Approx(1.2254167024651776).epsilon(1e-13));
    for (const auto& c : kGamma) {
        CAPTURE(c.x);
        CHECK(gamma_fn(c.x) == doctest::Approx(c.value).epsilon(1e-13));
    }
}

TEST_CASE("log gamma for large arguments") {
    CHECK(lgamma_fn(150.5) == doctest::Approx(602.51395487058541195).epsilon(1e-14));
    CHECK(lgamma_fn(2.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gamma rejects non-positive arguments") {
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
    CHECK_THROWS_AS(lgamma_fn(-2.0), DomainError);
}

TEST_CASE("reflection and reciprocal gamma") {
    CHECK(detail::gamma_any(-0.5) == doctest::Approx(-2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(detail::rgamma(0.0) == 0.0);
    CHECK(detail::rgamma(-3.0) == 0.0);
    CHECK(detail::rgamma(4.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("beta function") {
    CHECK(beta_fn(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(beta_fn(1.5 - 0.5, 0.5 + 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(beta_fn(0.75, 1.25) == doctest::Approx(std::tgamma(0.75) * std::tgamma(1.25)).epsilon(1e-13));
    CHECK_THROWS_AS(beta_fn(0.0, 1.0), DomainError);
}

TEST_CASE("hypergeometric trivial cases") {
    CHECK(hyp2f1(0.25, -0.25, 1.25, 0.0) == 1.0);
    for (double z : {-0.3, -5.0, -400.0}) CHECK(hyp2f1(0.0, 0.7, 1.3, z) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hyp2f1(1, 1, 2, -1) == doctest::Approx(std::log(2.0)).epsilon(1e-11));
    for (double z : {-0.1, -0.9, -3.0, -250.0})
        CHECK(hyp2f1(1, 1, 2, z) == doctest::Approx(-std::log1p(-z) / z).epsilon(1e-12));
}

TEST_CASE("hypergeometric reference values across the Pfaff and 1-w branches") {
    for (const auto& c : kHyp) {
        CAPTURE(c.z);
        CHECK(hyp2f1(c.a, c.b, c.c, c.z) == doctest::Approx(c.value).epsilon(1e-11));
    }
}

TEST_CASE("hypergeometric domain and policy checks") {
    CHECK_THROWS_AS(hyp2f1(0.2, 0.3, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(hyp2f1(0.2, 0.3, -1.0, -0.5), DomainError);
    PrecisionPolicy bad;
    bad.max_terms = 0;
    CHECK_THROWS(bad.validate());
}
