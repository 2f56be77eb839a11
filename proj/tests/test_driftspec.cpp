#include <doctest.h>

#include <cmath>
#include <numbers>

#include "modalbridge/driftspec.hpp"

using namespace modalbridge;
using namespace modalbridge::drift;

TEST_CASE("parsing builds the expected tree") {
    const auto e = parse_drift("0.5*x + sin(t)");
    const Node& r = e.root();
    REQUIRE(r.op == Op::Add);
    CHECK(r.lhs->op == Op::Mul);
    CHECK(r.lhs->lhs->number == 0.5);
    CHECK(r.lhs->rhs->var == Var::X);
    CHECK(r.rhs->op == Op::Call);
    CHECK(r.rhs->func == Func::Sin);
    CHECK(r.rhs->lhs->var == Var::T);
}

TEST_CASE("operator precedence and associativity") {
    CHECK(eval_drift(parse_drift("2^3^2"), 0, 0, 0) == 512.0);
    CHECK(eval_drift(parse_drift("-2^2"), 0, 0, 0) == -4.0);
    CHECK(eval_drift(parse_drift("2^-1"), 0, 0, 0) == 0.5);
    CHECK(eval_drift(parse_drift("8 - 3 - 2"), 0, 0, 0) == 3.0);
    CHECK(eval_drift(parse_drift("8 / 4 / 2"), 0, 0, 0) == 1.0);
    CHECK(eval_drift(parse_drift("1 + 2 * 3"), 0, 0, 0) == 7.0);
    CHECK(eval_drift(parse_drift("x − 2*y"), 0, 5, 1) == 3.0);
    CHECK(eval_drift(parse_drift("1.5e-1 * 2"), 0, 0, 0) == doctest::Approx(0.3));
}

TEST_CASE("syntax errors report the offset") {
    try {
        parse_drift("x + * y");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.offset() == 4);
        CHECK(e.kind() == ErrorKind::Syntax);
        CHECK_FALSE(e.expected().empty());
    }
    CHECK_THROWS_AS(parse_drift(""), SyntaxError);
    CHECK_THROWS_AS(parse_drift("z + 1"), SyntaxError);
    CHECK_THROWS_AS(parse_drift("sin x"), SyntaxError);
    CHECK_THROWS_AS(parse_drift("(x + 1"), SyntaxError);
    CHECK_THROWS_AS(parse_drift("foo(x)"), SyntaxError);
    std::string deep;
    for (int i = 0; i < 100; ++i) deep += "(";
    deep += "x";
    for (int i = 0; i < 100; ++i) deep += ")";
    CHECK_THROWS_AS(parse_drift(deep), SyntaxError);
}

TEST_CASE("evaluation") {
    CHECK(eval_drift(parse_drift("x"), 0, 3, -1) == 3.0);
    CHECK(eval_drift(parse_drift("sin(t)*y"), std::numbers::pi / 2, 0, 2) == doctest::Approx(2.0));
    CHECK(eval_drift(parse_drift("exp(log(x)) + sqrt(abs(y)) + tanh(0)"), 0, 2, -9) == doctest::Approx(5.0));
    CHECK(eval_drift(parse_drift("cos(0)"), 0, 0, 0) == 1.0);
    CHECK(eval_drift(DriftExpr(), 1, 2, 3) == 0.0);
}

TEST_CASE("evaluation domain errors") {
    auto kind_of = [](const char* src, double x) {
        try {
            eval_drift(parse_drift(src), 0, x, 0);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Config;
    };
    CHECK(kind_of("log(x)", -1) == ErrorKind::Evaluation);
    CHECK(kind_of("sqrt(x)", -1) == ErrorKind::Evaluation);
    CHECK(kind_of("1/x", 0) == ErrorKind::Evaluation);
    CHECK(kind_of("x^0.5", -2) == ErrorKind::Evaluation);
    CHECK(kind_of("exp(x)", 1000) == ErrorKind::Evaluation);
}

TEST_CASE("printing round-trips") {
    for (const char* src : {"0.5*x + sin(t)", "-2^2", "2^3^2", "x - (y - t)", "1/3*exp(-x^2)", "-(x)"}) {
        const auto e = parse_drift(src);
        const auto printed = print_drift(e);
        const auto again = parse_drift(printed);
        CAPTURE(src);
        CHECK(print_drift(again) == printed);
        for (double x : {-0.7, 0.4, 1.3}) CHECK(eval_drift(again, 0.2, x, 0.5) == eval_drift(e, 0.2, x, 0.5));
    }
}

TEST_CASE("variable references and depth") {
    const auto e = parse_drift("t*x + 1");
    CHECK(e.references(Var::T));
    CHECK(e.references(Var::X));
    CHECK_FALSE(e.references(Var::Y));
    CHECK(parse_drift("x").depth() == 1);
    CHECK(parse_drift("sin(x+1)").depth() == 3);
}

TEST_CASE("classification") {
    CHECK(classify_expr(parse_drift("sin(t)")) == DriftClass::TimeOnly);
    CHECK(classify_expr(parse_drift("2")) == DriftClass::TimeOnly);
    CHECK(classify_expr(parse_drift("t*x + y + 1")) == DriftClass::Linear);
    CHECK(classify_expr(parse_drift("x - 2*y")) == DriftClass::Linear);
    CHECK(classify_expr(parse_drift("(1+t)*(x - y)/2")) == DriftClass::Linear);
    CHECK(classify_expr(parse_drift("sin(x)")) == DriftClass::General);
    CHECK(classify_expr(parse_drift("x*y")) == DriftClass::General);
    CHECK(classify_expr(parse_drift("x/y")) == DriftClass::General);
    const auto m = make_model(0.5, 0.0, 0, 0, 1, parse_drift("sin(t)"), parse_drift("2"));
    CHECK(m.drift_class == DriftClass::TimeOnly);
    const auto l = make_model(0.3, 0.0, 0, 0, 1, parse_drift("t*x + y + 1"), parse_drift("x - 2*y"));
    CHECK(l.drift_class == DriftClass::Linear);
    const auto g = make_model(0.3, 0.0, 0, 0, 1, parse_drift("sin(x)"), parse_drift("0"));
    CHECK(classify_drift(g) == DriftClass::General);
}

TEST_CASE("linear family builder") {
    const auto e = linear_drift("t", "2", "sin(t)");
    CHECK(classify_expr(e) == DriftClass::Linear);
    CHECK(eval_drift(e, 0.5, 2, 3) == doctest::Approx(0.5 * 2 + 6 + std::sin(0.5)));
    CHECK_THROWS_AS(linear_drift("x", "1", "0"), ParameterError);
}

TEST_CASE("model invariants") {
    CHECK_THROWS_AS(make_model(1.2, 0, 0, 0, 1, DriftExpr(), DriftExpr()), Error);
    CHECK_THROWS_AS(make_model(0.3, 1.0, 0, 0, 1, DriftExpr(), DriftExpr()), ParameterError);
    CHECK_THROWS_AS(make_model(0.3, 0.2, 0, 0, 0.0, DriftExpr(), DriftExpr()), ParameterError);
    CHECK_THROWS_AS(make_model(0.7, 0.2, 0, 0, 1, DriftExpr(), parse_drift("sin(y)")), ParameterError);
    const auto m = make_model(0.7, 0.2, 0, 0, 1, DriftExpr(), parse_drift("sin(y)"), 0.3);
    CHECK(m.rho_bar() == doctest::Approx(std::sqrt(1 - 0.04)));
    CHECK(m.rho_H() == doctest::Approx(0.2 * m.hurst.kappa()));
}

TEST_CASE("assumption checks") {
    const auto c = make_model(0.5, 0, 0, 0, 1, parse_drift("1"), parse_drift("1"));
    const auto rc = validate_assumptions(c, {-1, 1, -1, 1}, 200);
    CHECK(rc.lipschitz_estimate == 0.0);
    CHECK(rc.violations.empty());
    CHECK(std::isinf(rc.contraction_horizon));

    const auto lin = make_model(0.5, 0, 0, 0, 1, parse_drift("3*x"), parse_drift("0"));
    const auto rl = validate_assumptions(lin, {-1, 1, -1, 1}, 200);
    CHECK(rl.lipschitz_estimate == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(rl.contraction_horizon == doctest::Approx(1.0 / 6.0).epsilon(1e-6));

    const auto root = make_model(0.5, 0, 0, 0, 0.1, parse_drift("1"), parse_drift("sqrt(abs(y))"));
    const auto rr = validate_assumptions(root, default_box(root), 200);
    bool growth = false;
    for (const auto& v : rr.violations) growth = growth || v.find("spacing") != std::string::npos;
    CHECK(growth);

    const auto box = default_box(lin);
    CHECK(box.x_hi == doctest::Approx(15.0));
    CHECK(box.y_lo == doctest::Approx(-15.0));
}
