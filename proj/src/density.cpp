#include "modalbridge/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "modalbridge/errors.hpp"

namespace modalbridge::density {

namespace {

double trapezoid(const std::vector<double>& v, double dt) {
    if (v.size() < 2) return 0.0;
    double sum = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
    return sum * dt;
}

double rho_bar_H_sq(const drift::ModelSpec& model) {
    const double rh = model.rho_H();
    const double v = 1.0 - rh * rh;
    if (v < 1e-10) throw ParameterError("1 - rho_H^2 = " + std::to_string(v) + " is below 1e-10");
    return v;
}

}  // namespace

double gaussian_prefactor(double dx, double dy, const drift::ModelSpec& model) {
    const double rbh2 = rho_bar_H_sq(model);
    const double T = model.T;
    const double H = model.H();
    const double u = dx / std::sqrt(T);
    const double v = dy / std::pow(T, H);
    const double q = (u * u - 2.0 * model.rho_H() * u * v + v * v) / (2.0 * rbh2);
    return std::exp(-q) / (2.0 * std::numbers::pi * std::pow(T, H + 0.5) * std::sqrt(rbh2));
}

DriftFunctionals drift_functionals(const drift::ModelSpec& model, const bridge::ModalPath& path) {
    const fbm::TimeGrid& grid = path.grid;
    const auto size = static_cast<std::size_t>(grid.n) + 1;
    std::vector<double> b1(size), b2(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double t = grid.node(static_cast<int>(i));
        b1[i] = model.h1(t, path.x_path[i], path.y_path[i]);
        b2[i] = model.h2(t, path.x_path[i], path.y_path[i]);
    }
    fraccalc::GridFunction bar1(grid, std::move(b1));
    fraccalc::GridFunction bar2(grid, std::move(b2));
    // K_H ĥ2 = ∫ h̄2; the integrand is known, so it is passed directly.
    fraccalc::GridFunction hat2 = fraccalc::invert_KH_from_derivative(bar2, model.hurst);
    const double rho = model.rho;
    const double rb = model.rho_bar();
    std::vector<double> h1(size);
    for (std::size_t i = 0; i < size; ++i) h1[i] = (bar1[i] - rho * hat2[i]) / rb;
    fraccalc::GridFunction hat1(grid, std::move(h1));

    const double dt = grid.dt();
    std::vector<double> sq1(size), sq2(size);
    for (std::size_t i = 0; i < size; ++i) {
        sq1[i] = hat1[i] * hat1[i];
        sq2[i] = hat2[i] * hat2[i];
    }
    DriftFunctionals f{bar1, bar2, hat1, hat2};
    f.int_bar_h1 = trapezoid(f.bar_h1.values, dt);
    f.int_bar_h2 = trapezoid(f.bar_h2.values, dt);
    f.int_hat_h1 = trapezoid(f.hat_h1.values, dt);
    f.int_hat_h2 = trapezoid(f.hat_h2.values, dt);
    f.int_hat_h1_sq = trapezoid(sq1, dt);
    f.int_hat_h2_sq = trapezoid(sq2, dt);
    return f;
}

double omega_full(const DriftFunctionals& f, const drift::ModelSpec& model, double x, double y) {
    const double rbh2 = rho_bar_H_sq(model);
    const double T = model.T;
    const double H = model.H();
    const double m1 = model.rho_bar() * f.int_hat_h1 + model.rho * f.int_hat_h2;
    const double m2 = f.int_bar_h2;
    // Σ(T)^-1 = [[T^2H, -ρ_H T^(H+1/2)], [-ρ_H T^(H+1/2), T]] / (T^(2H+1) ρ̄_H²)
    const double a = std::pow(T, 2.0 * H);
    const double b = -model.rho_H() * std::pow(T, H + 0.5);
    const double det = std::pow(T, 2.0 * H + 1.0) * rbh2;
    auto form = [&](double u1, double u2, double v1, double v2) { return (u1 * (a * v1 + b * v2) + u2 * (b * v1 + T * v2)) / det; };
    const double dx = x - model.x0;
    const double dy = y - model.y0;
    return form(m1, m2, dx, dy) - 0.5 * form(m1, m2, m1, m2);
}

double omega_1(const DriftFunctionals& f, const drift::ModelSpec& model, double x, double y) {
    const double rbh2 = rho_bar_H_sq(model);
    const double T = model.T;
    const double TH = std::pow(T, model.H());
    const double sT = std::sqrt(T);
    const double rh = model.rho_H();
    const double A = model.rho_bar() * f.int_hat_h1 / sT + model.rho * f.int_hat_h2 / sT - rh * f.int_bar_h2 / TH;
    const double u = (x - model.x0) / sT;
    const double v = (y - model.y0) / TH;
    return (A * u - rh * A * v + rbh2 * (f.int_bar_h2 / TH) * v) / rbh2;
}

double alpha_exponent(const drift::ModelSpec& model) {
    const double H = model.H();
    switch (model.drift_class) {
        case drift::DriftClass::TimeOnly: return std::numeric_limits<double>::infinity();
        case drift::DriftClass::Linear: return H > 0.5 ? 2.0 - 2.0 * H : 2.0 * H;
        case drift::DriftClass::General:
            if (H >= 0.75)
                throw UnsupportedError("the modal-path expansion for general drifts requires H < 3/4, got H = " +
                                       std::to_string(H));
            return H > 0.5 ? 3.0 - 4.0 * H : 2.0 * H;
    }
    return 2.0 * H;
}

DensityApprox approx_density(const drift::ModelSpec& model, double x, double y, int n) {
    DensityApprox out;
    out.alpha = alpha_exponent(model);
    const fbm::TimeGrid grid(model.T, n);
    const bridge::ModalPath path = bridge::modal_path(model, grid, x, y);
    const DriftFunctionals f = drift_functionals(model, path);
    out.phi = gaussian_prefactor(x - model.x0, y - model.y0, model);
    out.omega_full = omega_full(f, model, x, y);
    out.omega_1 = omega_1(f, model, x, y);
    out.p_hat = out.phi * std::exp(out.omega_1);
    out.p_hat_full = out.phi * std::exp(out.omega_full);
    return out;
}

}  // namespace modalbridge::density
