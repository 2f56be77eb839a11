#include "modalbridge/fraccalc.hpp"

#include <cmath>
#include <string>

#include "modalbridge/errors.hpp"
#include "modalbridge/specialfn.hpp"
#include "singular_cells.hpp"

namespace modalbridge::fraccalc {

namespace {

using detail::CellMoments;

// (t-s)^(alpha-1) s^p
struct PowerKernel {
    double alpha;
    double p;

    double value(double t, double s) const { return std::pow(t - s, alpha - 1.0) * std::pow(s, p); }

    CellMoments left_block(double t, double b, double ref) const {
        const auto& rule = quadrature::gauss_jacobi(20, 0.0, p);
        const double half = 0.5 * b;
        CellMoments out;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = half * (1.0 + rule.nodes[i]);
            const double g = rule.weights[i] * std::pow(t - s, alpha - 1.0);
            out.m0 += g;
            out.m1 += g * (s - ref);
        }
        const double scale = std::pow(half, p + 1.0);
        return {out.m0 * scale, out.m1 * scale};
    }

    CellMoments right_block(double t, double a, double ref) const {
        const auto& rule = quadrature::gauss_jacobi(20, alpha - 1.0, 0.0);
        const double half = 0.5 * (t - a);
        CellMoments out;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = t - half * (1.0 - rule.nodes[i]);
            const double g = rule.weights[i] * std::pow(s, p);
            out.m0 += g;
            out.m1 += g * (s - ref);
        }
        const double scale = std::pow(half, alpha);
        return {out.m0 * scale, out.m1 * scale};
    }
};

// (t^-alpha - s^-alpha) (t-s)^(-alpha-1), the kernel of the b(t) term of the inverse for H > 1/2.
struct InverseTailKernel {
    double alpha;

    // (t^-alpha - s^-alpha) / (t - s), without cancellation near s = t.
    double quotient(double t, double s) const {
        return std::pow(s, -alpha) * std::expm1(alpha * std::log(s / t)) / (t - s);
    }

    double value(double t, double s) const { return quotient(t, s) * std::pow(t - s, -alpha); }

    CellMoments left_block(double t, double b, double ref) const {
        // t^-alpha (t-s)^(-alpha-1) is smooth on [0, t/2]; -s^-alpha (t-s)^(-alpha-1) carries the weight.
        CellMoments out;
        const auto& gl = quadrature::gauss_legendre(20);
        const double half = 0.5 * b;
        const double ta = std::pow(t, -alpha);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double s = half * (1.0 + gl.nodes[i]);
            const double g = gl.weights[i] * ta * std::pow(t - s, -alpha - 1.0);
            out.m0 += half * g;
            out.m1 += half * g * (s - ref);
        }
        const auto& gj = quadrature::gauss_jacobi(20, 0.0, -alpha);
        const double scale = std::pow(half, 1.0 - alpha);
        for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
            const double s = half * (1.0 + gj.nodes[i]);
            const double g = gj.weights[i] * std::pow(t - s, -alpha - 1.0) * scale;
            out.m0 -= g;
            out.m1 -= g * (s - ref);
        }
        return out;
    }

    CellMoments right_block(double t, double a, double ref) const {
        const auto& rule = quadrature::gauss_jacobi(20, -alpha, 0.0);
        const double half = 0.5 * (t - a);
        CellMoments out;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = t - half * (1.0 - rule.nodes[i]);
            const double g = rule.weights[i] * quotient(t, s);
            out.m0 += g;
            out.m1 += g * (s - ref);
        }
        const double scale = std::pow(half, 1.0 - alpha);
        return {out.m0 * scale, out.m1 * scale};
    }
};

std::shared_ptr<const detail::UnitCellTable> power_table(int n, double alpha, double p) {
    static detail::TableCache<detail::UnitCellTable> cache;
    return cache.get({n, alpha, p}, [&] { return std::make_shared<const detail::UnitCellTable>(n, PowerKernel{alpha, p}); });
}

std::shared_ptr<const detail::UnitCellTable> tail_table(int n, double alpha) {
    static detail::TableCache<detail::UnitCellTable> cache;
    return cache.get({n, alpha, 0.0},
                     [&] { return std::make_shared<const detail::UnitCellTable>(n, InverseTailKernel{alpha}); });
}

void extrapolate_origin(std::vector<double>& v) {
    if (v.size() >= 3)
        v[0] = 2.0 * v[1] - v[2];
    else if (v.size() == 2)
        v[0] = v[1];
}

void check_order(const char* who, double alpha, double lo, double hi, bool hi_closed) {
    const bool ok = alpha > lo && (hi_closed ? alpha <= hi : alpha < hi);
    if (!ok)
        throw DomainError(std::string(who) + ": order " + std::to_string(alpha) + " outside " +
                          (hi_closed ? "(0, 1]" : "(0, 1)"));
}

// Γ(1-alpha) D^alpha f for piecewise-linear f: f(0) t^-alpha + ∫_0^t f'(s) (t-s)^-alpha ds.
std::vector<double> scaled_weyl(const GridFunction& f, double alpha) {
    const int n = f.grid.n;
    const double dt = f.grid.dt();
    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) w[static_cast<std::size_t>(m)] = std::pow(static_cast<double>(m), 1.0 - alpha);
    const double cell = std::pow(dt, -alpha) / (1.0 - alpha);
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    const auto& v = f.values;
    for (int k = 1; k <= n; ++k) {
        double sum = 0.0;
        for (int j = 0; j < k; ++j) {
            const std::size_t d = static_cast<std::size_t>(k - j);
            sum += (v[static_cast<std::size_t>(j) + 1] - v[static_cast<std::size_t>(j)]) * (w[d] - w[d - 1]);
        }
        out[static_cast<std::size_t>(k)] = v[0] * std::pow(f.grid.node(k), -alpha) + cell * sum;
    }
    extrapolate_origin(out);
    return out;
}

void check_invert_range(const fbm::Hurst& hurst) {
    if (hurst.value() > kMaxInvertHurst)
        throw UnsupportedError("invert_KH: H = " + std::to_string(hurst.value()) +
                               " exceeds the supported maximum 0.95");
}

double full_normaliser(const fbm::Hurst& hurst) { return hurst.c() * specialfn::gamma_fn(hurst.value() + 0.5); }

}  // namespace

GridFunction::GridFunction(const fbm::TimeGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(grid.n) + 1)
        throw DomainError("GridFunction: expected " + std::to_string(grid.n + 1) + " values, got " +
                          std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i])) throw DomainError("GridFunction: non-finite value at node " + std::to_string(i));
}

GridFunction GridFunction::sample(const fbm::TimeGrid& g, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(g.n) + 1);
    for (int i = 0; i <= g.n; ++i) v[static_cast<std::size_t>(i)] = f(g.node(i));
    return GridFunction(g, std::move(v));
}

GridFunction rl_integral(const GridFunction& f, double alpha) {
    check_order("rl_integral", alpha, 0.0, 1.0, true);
    const int n = f.grid.n;
    // Weights of the piecewise-linear interpolant depend only on k - j:
    //   end weight a_0k = (k-1)^(a+1) - (k-1-a) k^a, interior d_m = (m+1)^(a+1) - 2 m^(a+1) + (m-1)^(a+1).
    std::vector<double> pw(static_cast<std::size_t>(n) + 2);
    for (int m = 0; m <= n + 1; ++m) pw[static_cast<std::size_t>(m)] = std::pow(static_cast<double>(m), alpha + 1.0);
    std::vector<double> d(static_cast<std::size_t>(n) + 1, 0.0);
    for (int m = 1; m <= n; ++m) {
        const auto u = static_cast<std::size_t>(m);
        d[u] = pw[u + 1] - 2.0 * pw[u] + pw[u - 1];
    }
    const double pref = std::pow(f.grid.dt(), alpha) / specialfn::gamma_fn(alpha + 2.0);
    const auto& v = f.values;
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        double sum = (pw[static_cast<std::size_t>(k) - 1] - (kd - 1.0 - alpha) * std::pow(kd, alpha)) * v[0];
        for (int j = 1; j < k; ++j) sum += d[static_cast<std::size_t>(k - j)] * v[static_cast<std::size_t>(j)];
        sum += v[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(k)] = pref * sum;
    }
    return GridFunction(f.grid, std::move(out));
}

GridFunction weighted_rl_integral(const GridFunction& f, double alpha, double p) {
    if (!(alpha > 0.0)) throw DomainError("weighted_rl_integral: order must be positive");
    if (!(p > -1.0)) throw DomainError("weighted_rl_integral: weight exponent must exceed -1");
    const int n = f.grid.n;
    const auto table = power_table(n, alpha, p);
    const double degree = alpha + p;
    const double pref = std::pow(f.grid.dt(), degree) / specialfn::gamma_fn(alpha);
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k) out[static_cast<std::size_t>(k)] = pref * table->apply_row(k, f.values);
    if (degree < 0.0) {
        extrapolate_origin(out);
    } else if (degree == 0.0) {
        out[0] = f.values[0] * specialfn::beta_fn(alpha, p + 1.0) / specialfn::gamma_fn(alpha);
    }
    return GridFunction(f.grid, std::move(out));
}

GridFunction weyl_derivative(const GridFunction& f, double alpha) {
    check_order("weyl_derivative", alpha, 0.0, 1.0, false);
    std::vector<double> out = scaled_weyl(f, alpha);
    const double inv = 1.0 / specialfn::gamma_fn(1.0 - alpha);
    for (double& x : out) x *= inv;
    return GridFunction(f.grid, std::move(out));
}

GridFunction apply_KH(const GridFunction& f, const fbm::Hurst& hurst) {
    const int n = f.grid.n;
    const double dt = f.grid.dt();
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    if (hurst.is_brownian()) {
        for (int k = 1; k <= n; ++k) {
            const auto u = static_cast<std::size_t>(k);
            out[u] = out[u - 1] + 0.5 * dt * (f.values[u - 1] + f.values[u]);
        }
        return GridFunction(f.grid, std::move(out));
    }
    const auto table = fbm::cell_table(n, hurst);
    const double scale = std::pow(dt, hurst.value() + 0.5);
    for (int k = 1; k <= n; ++k) {
        double sum = 0.0;
        for (int j = 0; j < k; ++j) {
            const double a0 = table->m0(k, j);
            const double a1 = table->m1(k, j);
            sum += f.values[static_cast<std::size_t>(j)] * (a0 - a1) + f.values[static_cast<std::size_t>(j) + 1] * a1;
        }
        out[static_cast<std::size_t>(k)] = scale * sum;
    }
    return GridFunction(f.grid, std::move(out));
}

GridFunction apply_KH_factored(const GridFunction& f, const fbm::Hurst& hurst) {
    const double H = hurst.value();
    if (hurst.is_brownian()) return apply_KH(f, hurst);
    const double norm = full_normaliser(hurst);
    GridFunction out = [&] {
        if (H < 0.5) {
            const double beta = 0.5 - H;
            // I^(2H) u^beta [I^beta u^-beta f]
            const GridFunction inner = weighted_rl_integral(f, beta, -beta);
            return weighted_rl_integral(inner, 2.0 * H, beta);
        }
        const double alpha = H - 0.5;
        // I^1 u^alpha [I^alpha u^-alpha f]
        const GridFunction inner = weighted_rl_integral(f, alpha, -alpha);
        return weighted_rl_integral(inner, 1.0, alpha);
    }();
    for (double& x : out.values) x *= norm;
    return out;
}

GridFunction differentiate(const GridFunction& h) {
    const int n = h.grid.n;
    const double dt = h.grid.dt();
    const auto& v = h.values;
    std::vector<double> d(static_cast<std::size_t>(n) + 1);
    if (n == 1) {
        d[0] = d[1] = (v[1] - v[0]) / dt;
        return GridFunction(h.grid, std::move(d));
    }
    const auto last = static_cast<std::size_t>(n);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
    for (std::size_t i = 1; i < last; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dt);
    d[last] = (3.0 * v[last] - 4.0 * v[last - 1] + v[last - 2]) / (2.0 * dt);
    return GridFunction(h.grid, std::move(d));
}

GridFunction invert_KH(const GridFunction& h, const fbm::Hurst& hurst) {
    double scale = 1.0;
    for (double x : h.values) scale = std::max(scale, std::abs(x));
    if (std::abs(h.values[0]) > 1e-12 * scale)
        throw DomainError("invert_KH: h(0) must be 0, got " + std::to_string(h.values[0]));
    check_invert_range(hurst);
    if (hurst.is_brownian()) return differentiate(h);
    // h = K_H f behaves like f(0) kappa_H t^(H+1/2) near 0, whose derivative is singular for
    // H < 1/2 and spoils the differences there. That leading term is removed (its inverse is
    // the constant f(0)) and only the smoother remainder is differenced.
    const double H = hurst.value();
    const double p = H + 0.5;
    const double kappa = hurst.c() * specialfn::beta_fn(1.5 - H, H + 0.5) / p;
    const int n = h.grid.n;
    auto ratio = [&](int i) { return h.values[static_cast<std::size_t>(i)] / (kappa * std::pow(h.grid.node(i), p)); };
    const double lead = n >= 2 ? 2.0 * ratio(1) - ratio(2) : ratio(1);
    std::vector<double> rest(h.values);
    for (int i = 1; i <= n; ++i) rest[static_cast<std::size_t>(i)] -= lead * kappa * std::pow(h.grid.node(i), p);
    GridFunction out = invert_KH_from_derivative(differentiate(GridFunction(h.grid, std::move(rest))), hurst);
    for (double& x : out.values) x += lead;
    return out;
}

GridFunction invert_KH_from_derivative(const GridFunction& h_prime, const fbm::Hurst& hurst) {
    const double H = hurst.value();
    check_invert_range(hurst);
    if (hurst.is_brownian()) return h_prime;
    const int n = h_prime.grid.n;
    const double dt = h_prime.grid.dt();
    const double norm = full_normaliser(hurst);
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    if (H < 0.5) {
        const double beta = 0.5 - H;
        const GridFunction inner = weighted_rl_integral(h_prime, beta, beta);
        for (int k = 1; k <= n; ++k)
            out[static_cast<std::size_t>(k)] =
                std::pow(h_prime.grid.node(k), -beta) * inner.values[static_cast<std::size_t>(k)] / norm;
    } else {
        const double alpha = H - 0.5;
        const std::vector<double> a = scaled_weyl(h_prime, alpha);
        const auto table = tail_table(n, alpha);
        // ∫_0^{t_k} (t_k^-a - s^-a)(t_k - s)^(-a-1) f(s) ds = dt^(-2a) row_k, and t_k^a = (k dt)^a.
        const double row_scale = alpha * std::pow(dt, -alpha);
        const double pref = 1.0 / (norm * specialfn::gamma_fn(1.5 - H));
        for (int k = 1; k <= n; ++k) {
            const double b = row_scale * std::pow(static_cast<double>(k), alpha) * table->apply_row(k, h_prime.values);
            out[static_cast<std::size_t>(k)] = pref * (a[static_cast<std::size_t>(k)] + b);
        }
    }
    extrapolate_origin(out);
    return GridFunction(h_prime.grid, std::move(out));
}

}  // namespace modalbridge::fraccalc
