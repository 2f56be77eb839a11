#include "modalbridge/bridge.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "modalbridge/errors.hpp"

namespace modalbridge::bridge {

ConditionedGaussian condition_gaussian(const GaussianConditioner& g) {
    const Eigen::Index dim = g.mean.size();
    if (g.cov.rows() != dim || g.cov.cols() != dim) throw DomainError("condition_gaussian: covariance shape mismatch");
    const auto m = static_cast<Eigen::Index>(g.observed_indices.size());
    if (g.observed_values.size() != m) throw DomainError("condition_gaussian: observed values/indices mismatch");
    std::vector<char> is_observed(static_cast<std::size_t>(dim), 0);
    for (int idx : g.observed_indices) {
        if (idx < 0 || idx >= dim) throw DomainError("condition_gaussian: observed index out of range");
        if (is_observed[static_cast<std::size_t>(idx)]) throw DomainError("condition_gaussian: repeated observed index");
        is_observed[static_cast<std::size_t>(idx)] = 1;
    }
    ConditionedGaussian out;
    for (Eigen::Index i = 0; i < dim; ++i)
        if (!is_observed[static_cast<std::size_t>(i)]) out.free_indices.push_back(static_cast<int>(i));
    const auto k = static_cast<Eigen::Index>(out.free_indices.size());

    Eigen::MatrixXd syy(m, m), sxy(k, m), sxx(k, k);
    Eigen::VectorXd mx(k), resid(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const int ia = g.observed_indices[static_cast<std::size_t>(a)];
        resid(a) = g.observed_values(a) - g.mean(ia);
        for (Eigen::Index b = 0; b < m; ++b) syy(a, b) = g.cov(ia, g.observed_indices[static_cast<std::size_t>(b)]);
    }
    for (Eigen::Index a = 0; a < k; ++a) {
        const int ia = out.free_indices[static_cast<std::size_t>(a)];
        mx(a) = g.mean(ia);
        for (Eigen::Index b = 0; b < m; ++b) sxy(a, b) = g.cov(ia, g.observed_indices[static_cast<std::size_t>(b)]);
        for (Eigen::Index b = 0; b < k; ++b) sxx(a, b) = g.cov(ia, out.free_indices[static_cast<std::size_t>(b)]);
    }
    if (m == 0) {
        out.mean = mx;
        out.cov = sxx;
        out.gain = Eigen::MatrixXd::Zero(k, 0);
        return out;
    }
    const Eigen::MatrixXd L = fbm::jittered_cholesky(syy);
    // gain = Σ_XY Σ_YY^-1, via two triangular solves on the transpose
    const Eigen::MatrixXd half = L.triangularView<Eigen::Lower>().solve(sxy.transpose());
    out.gain = L.transpose().triangularView<Eigen::Upper>().solve(half).transpose();
    out.mean = mx + out.gain * resid;
    out.cov = sxx - half.transpose() * half;
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

std::vector<double> kernel_partial_row(const fbm::TimeGrid& grid, const fbm::Hurst& hurst) {
    const int n = grid.n;
    if (hurst.is_brownian()) return grid.nodes();
    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, std::vector<double>> cache;
    const std::tuple key{n, hurst.value(), grid.T};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i)
        row[static_cast<std::size_t>(i)] =
            row[static_cast<std::size_t>(i) - 1] +
            fbm::kernel_cell_moments(grid.T, grid.node(i - 1), grid.node(i), hurst).m0;
    std::lock_guard lock(mutex);
    if (cache.size() > 32) cache.clear();
    cache.emplace(key, row);
    return row;
}

namespace {

void check_grid(const drift::ModelSpec& model, const fbm::TimeGrid& grid) {
    if (std::abs(grid.T - model.T) > 1e-14 * model.T)
        throw DomainError("grid horizon " + std::to_string(grid.T) + " differs from model T " + std::to_string(model.T));
}

double checked_rho_bar_H_sq(const drift::ModelSpec& model) {
    const double rh = model.rho_H();
    const double v = 1.0 - rh * rh;
    if (v < 1e-10) throw ParameterError("1 - rho_H^2 = " + std::to_string(v) + " is below 1e-10");
    return v;
}

}  // namespace

CovBlocks cov_blocks(const drift::ModelSpec& model, const fbm::TimeGrid& grid) {
    check_grid(model, grid);
    const double T = model.T;
    const double H = model.H();
    const double rh = model.rho_H();
    CovBlocks out;
    out.sigma_T << T, rh * std::pow(T, H + 0.5), rh * std::pow(T, H + 0.5), std::pow(T, 2.0 * H);
    const std::vector<double> partial = kernel_partial_row(grid, model.hurst);
    out.sigma_tT.resize(static_cast<std::size_t>(grid.n) + 1);
    for (int i = 0; i <= grid.n; ++i) {
        const double t = grid.node(i);
        Eigen::Matrix2d b;
        b << t, model.rho * partial[static_cast<std::size_t>(i)], rh * std::pow(t, H + 0.5),
            fbm::autocovariance(t, T, model.hurst);
        out.sigma_tT[static_cast<std::size_t>(i)] = b;
    }
    return out;
}

ModalCoeffs modal_coeffs(const drift::ModelSpec& model, const fbm::TimeGrid& grid) {
    check_grid(model, grid);
    const double rbh2 = checked_rho_bar_H_sq(model);
    const double T = model.T;
    const double H = model.H();
    const double rho = model.rho;
    const double rh = model.rho_H();
    const double Th = std::pow(T, H + 0.5);
    const double T2h = std::pow(T, 2.0 * H);
    const std::vector<double> partial = kernel_partial_row(grid, model.hurst);
    const auto size = static_cast<std::size_t>(grid.n) + 1;
    ModalCoeffs c{std::vector<double>(size), std::vector<double>(size), std::vector<double>(size),
                  std::vector<double>(size)};
    for (std::size_t i = 0; i < size; ++i) {
        const double t = grid.node(static_cast<int>(i));
        const double P = partial[i];
        const double R = fbm::autocovariance(t, T, model.hurst);
        c.m11[i] = (t / T - rho * rh * P / Th) / rbh2;
        c.m12[i] = (-rh * t / Th + rho * P / T2h) / rbh2;
        c.m21[i] = rh / rbh2 * (std::pow(t, H + 0.5) / T - R / Th);
        c.m22[i] = (-rh * rh * std::pow(t / T, H + 0.5) + R / T2h) / rbh2;
    }
    return c;
}

ModalPath modal_path(const drift::ModelSpec& model, const fbm::TimeGrid& grid, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("modal_path: endpoint must be finite");
    ModalPath p{grid, modal_coeffs(model, grid), {}, {}, x, y};
    const double dx = x - model.x0;
    const double dy = y - model.y0;
    const std::size_t size = p.coeffs.m11.size();
    p.x_path.resize(size);
    p.y_path.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        p.x_path[i] = model.x0 + p.coeffs.m11[i] * dx + p.coeffs.m12[i] * dy;
        p.y_path[i] = model.y0 + p.coeffs.m21[i] * dx + p.coeffs.m22[i] * dy;
    }
    return p;
}

}  // namespace modalbridge::bridge
