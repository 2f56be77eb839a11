#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modalbridge/errors.hpp"
#include "modalbridge/fbm_kernel.hpp"

namespace modalbridge::drift {

enum class Var { T, X, Y };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs, Tanh };
enum class Op { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

struct Node {
    Op op = Op::Number;
    double number = 0.0;
    Var var = Var::T;
    Func func = Func::Sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

/// Thrown for malformed input; offset is a byte offset into the source.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t offset, std::vector<std::string> expected);

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Parsed drift h(t, x, y). Immutable and cheap to copy.
class DriftExpr {
public:
    static constexpr int kMaxDepth = 64;

    DriftExpr();  // the constant 0
    explicit DriftExpr(std::shared_ptr<const Node> root);

    const Node& root() const noexcept { return *root_; }
    bool references(Var v) const noexcept;
    int depth() const noexcept;

    /// Evaluates h(t, x, y); leaving a function's domain throws an evaluation error.
    double operator()(double t, double x, double y) const;

private:
    struct Instr {
        Op op;
        double number;
        Var var;
        Func func;
    };

    std::shared_ptr<const Node> root_;
    std::vector<Instr> program_;
    int stack_size_ = 0;
};

DriftExpr parse_drift(std::string_view source);

/// Fully parenthesised source text; parse_drift(print_drift(e)) rebuilds the same tree.
std::string print_drift(const DriftExpr& expr);

double eval_drift(const DriftExpr& expr, double t, double x, double y);

/// alpha(t) x + beta(t) y + gamma(t), the linear family. The coefficients must not depend on x or y.
DriftExpr linear_drift(std::string_view alpha, std::string_view beta, std::string_view gamma);

enum class DriftClass { TimeOnly, Linear, General };
const char* to_string(DriftClass c) noexcept;

/// Structural classification of a single expression.
DriftClass classify_expr(const DriftExpr& expr);

struct ModelSpec {
    fbm::Hurst hurst{0.5};
    double rho = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double T = 1.0;
    DriftExpr h1;
    DriftExpr h2;
    std::optional<double> holder_gamma;
    DriftClass drift_class = DriftClass::TimeOnly;

    double H() const noexcept { return hurst.value(); }
    double rho_bar() const;
    double rho_H() const;
    double rho_bar_H() const;
};

/// Builds a model, classifies the drifts and enforces the invariants (ParameterError otherwise).
ModelSpec make_model(double H, double rho, double x0, double y0, double T, DriftExpr h1, DriftExpr h2,
                     std::optional<double> holder_gamma = std::nullopt);

/// Re-checks the invariants of an existing model.
void check_model(const ModelSpec& model);

DriftClass classify_drift(const ModelSpec& model);

struct SampleBox {
    double x_lo, x_hi, y_lo, y_hi;
};

/// [x0 ± 15 √T] × [y0 ± 15 T^H].
SampleBox default_box(const ModelSpec& model);

struct AssumptionReport {
    double lipschitz_estimate = 0.0;
    double linear_growth_estimate = 0.0;
    double contraction_horizon = std::numeric_limits<double>::infinity();
    std::optional<double> holder_quotient;  // sampled t-Hölder quotient of h2 at the declared gamma
    std::vector<std::string> violations;
};

/// Sampled, advisory check of the Lipschitz, linear-growth and Hölder assumptions.
AssumptionReport validate_assumptions(const ModelSpec& model, const SampleBox& box, int samples,
                                      std::uint64_t seed = 0);

}  // namespace modalbridge::drift
