#include "modalbridge/driftspec.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace modalbridge::drift {

namespace {

struct FuncName {
    const char* name;
    Func func;
};
constexpr std::array<FuncName, 7> kFuncs{{{"sin", Func::Sin},
                                          {"cos", Func::Cos},
                                          {"exp", Func::Exp},
                                          {"log", Func::Log},
                                          {"sqrt", Func::Sqrt},
                                          {"abs", Func::Abs},
                                          {"tanh", Func::Tanh}}};

const char* func_name(Func f) {
    for (const auto& fn : kFuncs)
        if (fn.func == f) return fn.name;
    return "?";
}

const char* var_name(Var v) {
    switch (v) {
        case Var::T: return "t";
        case Var::X: return "x";
        case Var::Y: return "y";
    }
    return "?";
}

std::string format_number(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t offset;
    std::size_t length;
    double number = 0.0;
    std::string_view text{};
};

const std::vector<std::string> kOperand{"number", "identifier", "(", "-"};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::End, start, 0};
        const char c = src_[pos_];
        auto single = [&](Tok k) {
            ++pos_;
            return Token{k, start, 1};
        };
        switch (c) {
            case '+': return single(Tok::Plus);
            case '-': return single(Tok::Minus);
            case '*': return single(Tok::Star);
            case '/': return single(Tok::Slash);
            case '^': return single(Tok::Caret);
            case '(': return single(Tok::LParen);
            case ')': return single(Tok::RParen);
            default: break;
        }
        // U+2212 MINUS SIGN
        if (src_.substr(pos_, 3) == "\xE2\x88\x92") {
            pos_ += 3;
            return {Tok::Minus, start, 3};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            return {Tok::Ident, start, pos_ - start, 0.0, src_.substr(start, pos_ - start)};
        }
        throw SyntaxError("unexpected character '" + std::string(1, c) + "'", start, kOperand);
    }

private:
    Token number(std::size_t start) {
        auto digits = [&] {
            const std::size_t from = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            return pos_ - from;
        };
        std::size_t count = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) throw SyntaxError("malformed number", start, {"digit"});
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw SyntaxError("malformed exponent", mark, {"digit"});
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || !std::isfinite(value))
            throw SyntaxError("number out of range: " + std::string(text), start, {"number"});
        return {Tok::Number, start, pos_ - start, value, text};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

struct Parsed {
    std::shared_ptr<const Node> node;
    int depth;
};

// expr  := term (("+"|"-") term)*
// term  := unary (("*"|"/") unary)*
// unary := "-" unary | power
// power := primary ("^" unary)?
class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    Parsed parse() {
        Parsed out = expr();
        if (tok_.kind != Tok::End) {
            std::vector<std::string> expected{"+", "-", "*", "/", "^"};
            if (parens_ > 0) expected.emplace_back(")");
            expected.emplace_back("end of input");
            throw SyntaxError("unexpected token", tok_.offset, expected);
        }
        return out;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    Parsed make(Op op, Parsed l, Parsed r, std::size_t offset) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = l.node;
        n->rhs = r.node;
        return checked({n, 1 + std::max(l.depth, r.depth)}, offset);
    }

    Parsed checked(Parsed p, std::size_t offset) {
        if (p.depth > DriftExpr::kMaxDepth)
            throw SyntaxError("expression nesting exceeds depth 64", offset, {});
        return p;
    }

    Parsed expr() {
        const std::size_t start = tok_.offset;
        Parsed lhs = term();
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            const Op op = tok_.kind == Tok::Plus ? Op::Add : Op::Sub;
            advance();
            lhs = make(op, lhs, term(), start);
        }
        return lhs;
    }

    Parsed term() {
        const std::size_t start = tok_.offset;
        Parsed lhs = unary();
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            const Op op = tok_.kind == Tok::Star ? Op::Mul : Op::Div;
            advance();
            lhs = make(op, lhs, unary(), start);
        }
        return lhs;
    }

    Parsed unary() {
        const std::size_t start = tok_.offset;
        if (tok_.kind == Tok::Minus) {
            if (++nesting_ > DriftExpr::kMaxDepth) throw SyntaxError("expression nesting exceeds depth 64", start, {});
            advance();
            Parsed inner = unary();
            --nesting_;
            auto n = std::make_shared<Node>();
            n->op = Op::Negate;
            n->lhs = inner.node;
            return checked({n, inner.depth + 1}, start);
        }
        return power();
    }

    Parsed power() {
        const std::size_t start = tok_.offset;
        Parsed base = primary();
        if (tok_.kind != Tok::Caret) return base;
        advance();
        if (++nesting_ > DriftExpr::kMaxDepth) throw SyntaxError("expression nesting exceeds depth 64", start, {});
        Parsed exponent = unary();
        --nesting_;
        return make(Op::Pow, base, exponent, start);
    }

    Parsed primary() {
        const Token tok = tok_;
        switch (tok.kind) {
            case Tok::Number: {
                advance();
                auto n = std::make_shared<Node>();
                n->op = Op::Number;
                n->number = tok.number;
                return {n, 1};
            }
            case Tok::LParen: {
                if (++nesting_ > DriftExpr::kMaxDepth)
                    throw SyntaxError("expression nesting exceeds depth 64", tok.offset, {});
                advance();
                ++parens_;
                Parsed inner = expr();
                expect_close();
                --parens_;
                --nesting_;
                return inner;
            }
            case Tok::Ident: return identifier(tok);
            default: break;
        }
        throw SyntaxError(tok.kind == Tok::End ? "unexpected end of input" : "unexpected token", tok.offset, kOperand);
    }

    Parsed identifier(const Token& tok) {
        advance();
        auto n = std::make_shared<Node>();
        if (tok.text == "t" || tok.text == "x" || tok.text == "y") {
            n->op = Op::Variable;
            n->var = tok.text == "t" ? Var::T : tok.text == "x" ? Var::X : Var::Y;
            return {n, 1};
        }
        for (const auto& fn : kFuncs) {
            if (tok.text != fn.name) continue;
            if (tok_.kind != Tok::LParen) throw SyntaxError("expected '(' after " + std::string(fn.name), tok_.offset, {"("});
            if (++nesting_ > DriftExpr::kMaxDepth)
                throw SyntaxError("expression nesting exceeds depth 64", tok.offset, {});
            advance();
            ++parens_;
            Parsed arg = expr();
            expect_close();
            --parens_;
            --nesting_;
            n->op = Op::Call;
            n->func = fn.func;
            n->lhs = arg.node;
            return checked({n, arg.depth + 1}, tok.offset);
        }
        std::vector<std::string> known{"t", "x", "y"};
        for (const auto& fn : kFuncs) known.emplace_back(fn.name);
        throw SyntaxError("unknown identifier '" + std::string(tok.text) + "'", tok.offset, known);
    }

    void expect_close() {
        if (tok_.kind != Tok::RParen) throw SyntaxError("expected ')'", tok_.offset, {")", "+", "-", "*", "/", "^"});
        advance();
    }

    Lexer lexer_;
    Token tok_{Tok::End, 0, 0};
    int parens_ = 0;
    int nesting_ = 0;
};

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += "'" + items[i] + "'";
    }
    return out;
}

int depth_of(const Node& n) {
    int d = 0;
    if (n.lhs) d = std::max(d, depth_of(*n.lhs));
    if (n.rhs) d = std::max(d, depth_of(*n.rhs));
    return d + 1;
}

bool references_node(const Node& n, Var v) {
    if (n.op == Op::Variable) return n.var == v;
    return (n.lhs && references_node(*n.lhs, v)) || (n.rhs && references_node(*n.rhs, v));
}

void print_node(const Node& n, std::string& out) {
    switch (n.op) {
        case Op::Number: out += format_number(n.number); return;
        case Op::Variable: out += var_name(n.var); return;
        case Op::Negate:
            out += "(-";
            print_node(*n.lhs, out);
            out += ")";
            return;
        case Op::Call:
            out += func_name(n.func);
            out += "(";
            print_node(*n.lhs, out);
            out += ")";
            return;
        default: break;
    }
    const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? " * " : n.op == Op::Div ? " / " : " ^ ";
    out += "(";
    print_node(*n.lhs, out);
    out += sym;
    print_node(*n.rhs, out);
    out += ")";
}

[[noreturn]] void eval_fail(const std::string& what, double t, double x, double y) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " at (t, x, y) = (" << t << ", " << x << ", " << y << ")";
    throw Error(ErrorKind::Evaluation, msg.str());
}

// Affine-in-(x, y) structure with t-only coefficients.
enum class Shape { TimeOnly = 0, Affine = 1, Nonlinear = 2 };

Shape shape_of(const Node& n) {
    switch (n.op) {
        case Op::Number: return Shape::TimeOnly;
        case Op::Variable: return n.var == Var::T ? Shape::TimeOnly : Shape::Affine;
        case Op::Negate: return shape_of(*n.lhs);
        case Op::Add:
        case Op::Sub: return std::max(shape_of(*n.lhs), shape_of(*n.rhs));
        case Op::Mul: {
            const Shape a = shape_of(*n.lhs);
            const Shape b = shape_of(*n.rhs);
            if (a == Shape::Nonlinear || b == Shape::Nonlinear) return Shape::Nonlinear;
            if (a == Shape::Affine && b == Shape::Affine) return Shape::Nonlinear;
            return std::max(a, b);
        }
        case Op::Div: return shape_of(*n.rhs) == Shape::TimeOnly ? shape_of(*n.lhs) : Shape::Nonlinear;
        case Op::Pow: {
            const Shape base = shape_of(*n.lhs);
            const Shape ex = shape_of(*n.rhs);
            if (base == Shape::TimeOnly && ex == Shape::TimeOnly) return Shape::TimeOnly;
            if (ex == Shape::TimeOnly && n.rhs->op == Op::Number) {
                if (n.rhs->number == 0.0) return Shape::TimeOnly;
                if (n.rhs->number == 1.0) return base;
            }
            return Shape::Nonlinear;
        }
        case Op::Call: return shape_of(*n.lhs) == Shape::TimeOnly ? Shape::TimeOnly : Shape::Nonlinear;
    }
    return Shape::Nonlinear;
}

}  // namespace

SyntaxError::SyntaxError(const std::string& message, std::size_t offset, std::vector<std::string> expected)
    : Error(ErrorKind::Syntax, message + " at offset " + std::to_string(offset) +
                                   (expected.empty() ? std::string() : "; expected one of " + join(expected))),
      offset_(offset),
      expected_(std::move(expected)) {}

DriftExpr::DriftExpr() : DriftExpr(std::make_shared<Node>()) {}

DriftExpr::DriftExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {
    if (!root_) throw DomainError("DriftExpr: null tree");
    if (depth() > kMaxDepth) throw DomainError("DriftExpr: tree depth exceeds 64");
    // Flatten to postfix for evaluation.
    int height = 0;
    auto emit = [&](auto&& self, const Node& n) -> void {
        if (n.lhs) self(self, *n.lhs);
        if (n.rhs) self(self, *n.rhs);
        program_.push_back({n.op, n.number, n.var, n.func});
        if (n.op == Op::Number || n.op == Op::Variable) stack_size_ = std::max(stack_size_, ++height);
        else if (n.rhs) --height;
    };
    emit(emit, *root_);
}

bool DriftExpr::references(Var v) const noexcept { return references_node(*root_, v); }

int DriftExpr::depth() const noexcept { return depth_of(*root_); }

double DriftExpr::operator()(double t, double x, double y) const {
    std::array<double, kMaxDepth + 2> stack{};
    int top = -1;
    for (const Instr& ins : program_) {
        switch (ins.op) {
            case Op::Number: stack[++top] = ins.number; break;
            case Op::Variable: stack[++top] = ins.var == Var::T ? t : ins.var == Var::X ? x : y; break;
            case Op::Negate: stack[top] = -stack[top]; break;
            case Op::Call: {
                const double a = stack[top];
                double r = 0.0;
                switch (ins.func) {
                    case Func::Sin: r = std::sin(a); break;
                    case Func::Cos: r = std::cos(a); break;
                    case Func::Exp: r = std::exp(a); break;
                    case Func::Log:
                        if (!(a > 0.0)) eval_fail("log argument " + format_number(a) + " outside (0, inf)", t, x, y);
                        r = std::log(a);
                        break;
                    case Func::Sqrt:
                        if (!(a >= 0.0)) eval_fail("sqrt argument " + format_number(a) + " is negative", t, x, y);
                        r = std::sqrt(a);
                        break;
                    case Func::Abs: r = std::abs(a); break;
                    case Func::Tanh: r = std::tanh(a); break;
                }
                if (!std::isfinite(r)) eval_fail(std::string(func_name(ins.func)) + " overflow for argument " + format_number(a), t, x, y);
                stack[top] = r;
                break;
            }
            default: {
                const double b = stack[top--];
                const double a = stack[top];
                double r = 0.0;
                switch (ins.op) {
                    case Op::Add: r = a + b; break;
                    case Op::Sub: r = a - b; break;
                    case Op::Mul: r = a * b; break;
                    case Op::Div:
                        if (b == 0.0) eval_fail("division by zero", t, x, y);
                        r = a / b;
                        break;
                    default:
                        r = std::pow(a, b);
                        if (!std::isfinite(r))
                            eval_fail("power " + format_number(a) + " ^ " + format_number(b) + " is undefined or overflows", t, x, y);
                        break;
                }
                if (!std::isfinite(r)) eval_fail("arithmetic overflow", t, x, y);
                stack[top] = r;
            }
        }
    }
    return stack[0];
}

DriftExpr parse_drift(std::string_view source) {
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw SyntaxError("empty expression", 0, kOperand);
    return DriftExpr(Parser(source).parse().node);
}

std::string print_drift(const DriftExpr& expr) {
    std::string out;
    print_node(expr.root(), out);
    return out;
}

double eval_drift(const DriftExpr& expr, double t, double x, double y) { return expr(t, x, y); }

DriftExpr linear_drift(std::string_view alpha, std::string_view beta, std::string_view gamma) {
    const std::array<std::string_view, 3> parts{alpha, beta, gamma};
    for (std::string_view p : parts) {
        const DriftExpr e = parse_drift(p);
        if (e.references(Var::X) || e.references(Var::Y))
            throw ParameterError("linear_drift: coefficient '" + std::string(p) + "' must depend on t only");
    }
    return parse_drift("(" + std::string(alpha) + ")*x + (" + std::string(beta) + ")*y + (" + std::string(gamma) + ")");
}

const char* to_string(DriftClass c) noexcept {
    switch (c) {
        case DriftClass::TimeOnly: return "TimeOnly";
        case DriftClass::Linear: return "Linear";
        case DriftClass::General: return "General";
    }
    return "General";
}

DriftClass classify_expr(const DriftExpr& expr) {
    if (!expr.references(Var::X) && !expr.references(Var::Y)) return DriftClass::TimeOnly;
    return shape_of(expr.root()) == Shape::Nonlinear ? DriftClass::General : DriftClass::Linear;
}

DriftClass classify_drift(const ModelSpec& model) {
    return std::max(classify_expr(model.h1), classify_expr(model.h2));
}

double ModelSpec::rho_bar() const { return std::sqrt(1.0 - rho * rho); }
double ModelSpec::rho_H() const { return rho * hurst.kappa(); }
double ModelSpec::rho_bar_H() const {
    const double r = rho_H();
    return std::sqrt(1.0 - r * r);
}

void check_model(const ModelSpec& m) {
    if (!(std::abs(m.rho) < 1.0)) throw ParameterError("rho must satisfy |rho| < 1, got " + format_number(m.rho));
    if (!(m.T > 0.0) || !std::isfinite(m.T)) throw ParameterError("T must be positive and finite");
    if (!std::isfinite(m.x0) || !std::isfinite(m.y0)) throw ParameterError("x0 and y0 must be finite");
    const double rh = m.rho_H();
    if (1.0 - rh * rh < 1e-10)
        throw ParameterError("1 - rho^2 kappa_H^2 = " + format_number(1.0 - rh * rh) + " is below 1e-10");
    const double H = m.H();
    if (H > 0.5 && m.drift_class != DriftClass::TimeOnly) {
        if (!m.holder_gamma)
            throw ParameterError("holder_gamma is required when H > 1/2 and the drift depends on x or y");
        const double g = *m.holder_gamma;
        if (!(g > H - 0.5 && g < 0.5))
            throw ParameterError("holder_gamma must lie in (H - 1/2, 1/2) = (" + format_number(H - 0.5) +
                                 ", 0.5), got " + format_number(g));
    }
}

ModelSpec make_model(double H, double rho, double x0, double y0, double T, DriftExpr h1, DriftExpr h2,
                     std::optional<double> holder_gamma) {
    if (!(H > 0.0 && H < 1.0)) throw ParameterError("H must lie in (0, 1), got " + format_number(H));
    ModelSpec m{fbm::Hurst(H), rho, x0, y0, T, std::move(h1), std::move(h2), holder_gamma, DriftClass::TimeOnly};
    m.drift_class = classify_drift(m);
    check_model(m);
    return m;
}

SampleBox default_box(const ModelSpec& m) {
    const double wx = 15.0 * std::sqrt(m.T);
    const double wy = 15.0 * std::pow(m.T, m.H());
    return {m.x0 - wx, m.x0 + wx, m.y0 - wy, m.y0 + wy};
}

AssumptionReport validate_assumptions(const ModelSpec& model, const SampleBox& box, int samples, std::uint64_t seed) {
    if (!(box.x_lo < box.x_hi) || !(box.y_lo < box.y_hi) || !std::isfinite(box.x_lo) || !std::isfinite(box.x_hi) ||
        !std::isfinite(box.y_lo) || !std::isfinite(box.y_hi))
        throw DomainError("validate_assumptions: sample box must be finite and nonempty");
    AssumptionReport report;
    const double T = model.T;

    struct Point {
        double t, x, y;
    };
    std::vector<Point> points;
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j)
            for (double t : {0.0, 0.5 * T, T})
                points.push_back({t, box.x_lo + 0.25 * i * (box.x_hi - box.x_lo), box.y_lo + 0.25 * j * (box.y_hi - box.y_lo)});
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < std::max(samples, 0); ++k)
        points.push_back({T * unit(engine), box.x_lo + (box.x_hi - box.x_lo) * unit(engine),
                          box.y_lo + (box.y_hi - box.y_lo) * unit(engine)});

    constexpr int kLevels = 4;
    const std::array<const DriftExpr*, 2> drifts{&model.h1, &model.h2};
    const std::array<const char*, 2> names{"h1", "h2"};
    const double wx = box.x_hi - box.x_lo;
    const double wy = box.y_hi - box.y_lo;
    bool eval_warned = false;

    for (std::size_t d = 0; d < drifts.size(); ++d) {
        const DriftExpr& h = *drifts[d];
        // quotient maxima per axis and spacing level, with the location of the finest maximum
        std::array<std::array<double, kLevels>, 2> qmax{};
        std::array<Point, 2> where{};
        for (const Point& p : points) {
            double base = 0.0;
            try {
                base = h(p.t, p.x, p.y);
            } catch (const Error& e) {
                if (!eval_warned) report.violations.push_back(std::string(names[d]) + " evaluation failed: " + e.what());
                eval_warned = true;
                continue;
            }
            report.linear_growth_estimate =
                std::max(report.linear_growth_estimate, std::abs(base) / (1.0 + std::abs(p.x) + std::abs(p.y)));
            for (int axis = 0; axis < 2; ++axis) {
                for (int level = 0; level < kLevels; ++level) {
                    const double step = (axis == 0 ? wx : wy) * std::pow(10.0, -(level + 1));
                    double moved = 0.0;
                    try {
                        moved = axis == 0 ? h(p.t, p.x + step, p.y) : h(p.t, p.x, p.y + step);
                    } catch (const Error&) {
                        continue;
                    }
                    const double q = std::abs(moved - base) / step;
                    if (q > qmax[axis][level]) {
                        qmax[axis][level] = q;
                        if (level == kLevels - 1) where[axis] = p;
                    }
                }
            }
        }
        for (int axis = 0; axis < 2; ++axis) {
            for (double q : qmax[axis]) report.lipschitz_estimate = std::max(report.lipschitz_estimate, q);
            const double coarse = qmax[axis][0];
            const double fine = qmax[axis][kLevels - 1];
            if (fine > 4.0 * coarse && fine > 1e-12) {
                std::ostringstream msg;
                msg.precision(6);
                msg << "sampled Lipschitz quotient of " << names[d] << " in " << (axis == 0 ? "x" : "y")
                    << " grows from " << coarse << " to " << fine << " as the spacing shrinks by 1000x (near "
                    << (axis == 0 ? "x = " : "y = ") << (axis == 0 ? where[axis].x : where[axis].y)
                    << "); the drift may not be Lipschitz";
                report.violations.push_back(msg.str());
            }
        }
    }

    if (report.lipschitz_estimate > 0.0) report.contraction_horizon = 1.0 / (2.0 * report.lipschitz_estimate);
    if (T >= report.contraction_horizon) {
        std::ostringstream msg;
        msg << "T = " << T << " is not below the contraction horizon 1/(2L) = " << report.contraction_horizon;
        report.violations.push_back(msg.str());
    }

    const double H = model.H();
    if (H > 0.5) {
        const double gamma = model.holder_gamma.value_or(H - 0.5 + 0.5 * (1.0 - H));
        std::array<double, kLevels> hq{};
        for (const Point& p : points) {
            for (int level = 0; level < kLevels; ++level) {
                const double step = T * std::pow(10.0, -(level + 1));
                const double s = p.t + step <= T ? p.t : p.t - step;
                try {
                    const double q = std::abs(model.h2(s + step, p.x, p.y) - model.h2(s, p.x, p.y)) / std::pow(step, gamma);
                    hq[static_cast<std::size_t>(level)] = std::max(hq[static_cast<std::size_t>(level)], q);
                } catch (const Error&) {
                }
            }
        }
        report.holder_quotient = *std::max_element(hq.begin(), hq.end());
        if (hq[kLevels - 1] > 4.0 * hq[0] && hq[kLevels - 1] > 1e-12) {
            std::ostringstream msg;
            msg << "sampled t-Hoelder quotient of h2 at gamma = " << gamma << " grows from " << hq[0] << " to "
                << hq[kLevels - 1] << " as the spacing shrinks";
            report.violations.push_back(msg.str());
        }
        if (model.drift_class == DriftClass::Linear) {
            try {
                const double c = model.h2(0.0, 0.0, 0.0);
                if (model.h2(0.0, 1.0, 0.0) != c || model.h2(0.0, 0.0, 1.0) != c)
                    report.violations.push_back("linear h2 with H > 1/2 should have vanishing x and y coefficients at t = 0");
            } catch (const Error&) {
            }
        }
    }
    return report;
}

}  // namespace modalbridge::drift
