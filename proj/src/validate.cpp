#include "modalbridge/validate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "modalbridge/density.hpp"
#include "modalbridge/errors.hpp"
#include "modalbridge/fbm_kernel.hpp"
#include "modalbridge/fraccalc.hpp"
#include "modalbridge/mc.hpp"
#include "modalbridge/parallel.hpp"

namespace modalbridge::validate {

namespace {

constexpr double kHurstSet[] = {0.05, 0.1, 0.25, 0.4, 0.5, 0.6, 0.7, 0.75, 0.9};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

drift::ModelSpec model(double H, double rho, double x0, double y0, double T, const char* h1, const char* h2) {
    return drift::make_model(H, rho, x0, y0, T, drift::parse_drift(h1), drift::parse_drift(h2));
}

// Bivariate normal density of (X_T, Y_T) for drifts depending on t only: mean shifted by ∫h, covariance Σ(T).
double gaussian_oracle(const drift::ModelSpec& m, double x, double y, double int_h1, double int_h2) {
    const double T = m.T;
    const double H = m.H();
    Eigen::Matrix2d cov;
    const double c = m.rho * m.hurst.kappa() * std::pow(T, H + 0.5);
    cov << T, c, c, std::pow(T, 2.0 * H);
    const Eigen::Vector2d d(x - m.x0 - int_h1, y - m.y0 - int_h2);
    const double q = d.dot(cov.inverse() * d);
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(cov.determinant()));
}

void criterion_1(CriterionResult& r, const Options&) {
    double worst = 0.0;
    for (double H : kHurstSet) {
        const fbm::Hurst h(H);
        for (double t : {0.1, 1.0, 2.0}) {
            const double quad = fbm::kernel_partial_integral(t, t, h);
            const double closed = h.kappa() * std::pow(t, H + 0.5);
            worst = std::max(worst, std::abs(quad / closed - 1.0));
        }
    }
    r.passed = worst <= 1e-6;
    r.detail = fmt("max relative error %.3e (limit 1e-6)", worst);
}

void criterion_2(CriterionResult& r, const Options&) {
    double worst = 0.0;
    for (double H : kHurstSet) {
        const fbm::Hurst h(H);
        for (int i = 0; i < 20; ++i) {
            const double t = 0.1 * (i + 1);
            for (int j = 0; j < 20; ++j) {
                const double s = t * (0.025 + 0.95 * j / 19.0);
                const double a = fbm::kernel_hyp(t, s, h);
                const double b = fbm::kernel_alt(t, s, h);
                worst = std::max(worst, std::abs(a - b) / std::abs(a));
            }
        }
    }
    r.passed = worst <= 1e-8;
    r.detail = fmt("max relative difference %.3e (limit 1e-8)", worst);
}

void criterion_3(CriterionResult& r, const Options& o) {
    const int n1 = o.quick ? 500 : 2000;
    const int n2 = 2 * n1;
    const std::function<double(double)> fs[] = {
        [](double) { return 1.0; }, [](double t) { return t; }, [](double t) { return std::sin(t); },
        [](double t) { return std::exp(t); }};
    const char* names[] = {"1", "t", "sin t", "e^t"};
    auto interior_error = [&](double H, int fi, int n) {
        const fbm::Hurst h(H);
        const fbm::TimeGrid grid(1.0, n);
        const auto f = fraccalc::GridFunction::sample(grid, fs[fi]);
        const auto back = fraccalc::invert_KH(fraccalc::apply_KH(f, h), h);
        double e = 0.0;
        for (int i = n / 50; i <= n - n / 50; ++i) e = std::max(e, std::abs(back[i] - f[i]));
        return e;
    };
    // Errors at the rounding floor cannot improve further and count as converged.
    constexpr double floor = 1e-9;
    bool ok = true;
    double worst = 0.0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    std::string failures;
    for (double H : {0.25, 0.5, 0.75}) {
        for (int fi = 0; fi < 4; ++fi) {
            const double e1 = interior_error(H, fi, n1);
            const double e2 = interior_error(H, fi, n2);
            worst = std::max(worst, e1);
            const bool converged = e2 <= floor;
            if (!converged) worst_ratio = std::min(worst_ratio, e1 / e2);
            if (e1 > 1e-3 || (!converged && e1 / e2 < 1.5)) {
                ok = false;
                failures += fmt(" [H=%g f=%s e=%.2e ratio=%.2f]", H, names[fi], e1, e1 / e2);
            }
        }
    }
    r.passed = ok;
    r.detail = fmt("n=%d max interior error %.3e (limit 1e-3); min improvement at n=%d %.2f (limit 1.5, errors below 1e-9 exempt)",
                   n1, worst, n2, worst_ratio) +
               failures;
}

void criterion_4(CriterionResult& r, const Options&) {
    const fbm::TimeGrid grid(1.0, 1000);
    double pin = 0.0;
    for (double H : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double rho : {-0.6, 0.0, 0.8}) {
            const auto m = model(H, rho, 0.3, -0.4, 1.0, "0", "0");
            const auto p = bridge::modal_path(m, grid, 1.2, 0.5);
            pin = std::max({pin, std::abs(p.x_path.front() - 0.3), std::abs(p.y_path.front() + 0.4),
                            std::abs(p.x_path.back() - 1.2), std::abs(p.y_path.back() - 0.5)});
        }
    double line = 0.0;
    for (double rho : {-0.6, 0.0, 0.8}) {
        const auto m = model(0.5, rho, 0.3, -0.4, 1.0, "0", "0");
        const auto p = bridge::modal_path(m, grid, 1.2, 0.5);
        for (int i = 0; i <= grid.n; ++i) {
            const double s = grid.node(i);
            const auto u = static_cast<std::size_t>(i);
            line = std::max({line, std::abs(p.x_path[u] - (0.3 + 0.9 * s)), std::abs(p.y_path[u] - (-0.4 + 0.9 * s))});
        }
    }
    bool decoupled = true;
    for (double H : {0.2, 0.5, 0.8}) {
        const auto c = bridge::modal_coeffs(model(H, 0.0, 0.0, 0.0, 1.0, "0", "0"), grid);
        for (std::size_t i = 0; i < c.m12.size(); ++i)
            decoupled = decoupled && c.m12[i] == 0.0 && c.m21[i] == 0.0 && c.m11[i] == grid.node(static_cast<int>(i));
    }
    const auto jump = bridge::modal_path(model(0.01, 0.0, 0.0, 0.0, 1.0, "0", "0"), grid, 1.0, 1.0);
    const double y05 = jump.y_path[50];
    r.passed = pin <= 1e-10 && line <= 1e-12 && decoupled && y05 > 0.45 && y05 < 0.55;
    r.detail = fmt("pinning %.2e (1e-10); H=1/2 line deviation %.2e (1e-12); rho=0 decoupling %s; H=0.01 y(0.05)=%.4f in (0.45, 0.55)",
                   pin, line, decoupled ? "exact" : "broken", y05);
}

void criterion_5(CriterionResult& r, const Options& o) {
    // Analytic bivariate case.
    bridge::GaussianConditioner g;
    g.mean = Eigen::Vector2d(0.3, -1.1);
    g.cov.resize(2, 2);
    g.cov << 2.0, 0.6, 0.6, 0.5;
    g.observed_indices = {1};
    g.observed_values = Eigen::VectorXd::Constant(1, 0.4);
    const auto c = bridge::condition_gaussian(g);
    const double mean_exact = 0.3 + 0.6 / 0.5 * (0.4 + 1.1);
    const double var_exact = 2.0 - 0.6 * 0.6 / 0.5;
    const double analytic = std::max(std::abs(c.mean(0) - mean_exact), std::abs(c.cov(0, 0) - var_exact));

    // Random 6x6 instance against least squares on joint samples.
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(6, 6);
    for (int i = 0; i < 36; ++i) a(i) = normal(rng);
    bridge::GaussianConditioner g6;
    g6.cov = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(6, 6);
    g6.mean.resize(6);
    for (int i = 0; i < 6; ++i) g6.mean(i) = normal(rng);
    g6.observed_indices = {1, 4};
    g6.observed_values = Eigen::Vector2d(g6.mean(1) + 0.7, g6.mean(4) - 1.2);
    const auto c6 = bridge::condition_gaussian(g6);

    const int samples = o.quick ? 200000 : 1000000;
    const Eigen::MatrixXd L = g6.cov.llt().matrixL();
    Eigen::MatrixXd design(samples, 3), response(samples, 4);
    Eigen::VectorXd z(6);
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < 6; ++i) z(i) = normal(rng);
        const Eigen::VectorXd v = g6.mean + L * z;
        design.row(s) << 1.0, v(1), v(4);
        response.row(s) << v(0), v(2), v(3), v(5);
    }
    const Eigen::Matrix3d gram = design.transpose() * design;
    const Eigen::MatrixXd beta = gram.ldlt().solve(design.transpose() * response);
    const Eigen::MatrixXd resid = response - design * beta;
    const Eigen::Matrix3d gram_inv = gram.inverse();
    const Eigen::Vector3d x_obs(1.0, g6.observed_values(0), g6.observed_values(1));
    double worst_z = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double s2 = resid.col(k).squaredNorm() / (samples - 3);
        const double pred = x_obs.dot(beta.col(k));
        const double pred_se = std::sqrt(s2 * x_obs.dot(gram_inv * x_obs));
        worst_z = std::max(worst_z, std::abs(pred - c6.mean(k)) / pred_se);
        for (int j = 0; j < 2; ++j) {
            const double se = std::sqrt(s2 * gram_inv(j + 1, j + 1));
            worst_z = std::max(worst_z, std::abs(beta(j + 1, k) - c6.gain(k, j)) / se);
        }
        const double var_se = c6.cov(k, k) * std::sqrt(2.0 / samples);
        worst_z = std::max(worst_z, std::abs(s2 - c6.cov(k, k)) / var_se);
    }
    r.passed = analytic <= 1e-12 && worst_z <= 3.0;
    r.detail = fmt("bivariate error %.2e (1e-12); 6x6 vs %d-sample regression: max |z| %.2f (3)", analytic, samples, worst_z);
}

// Drifts linear in t so the trapezoid brackets are exact.
constexpr const char* kTimeOnlyH1 = "0.4 + 0.6*t";
constexpr const char* kTimeOnlyH2 = "-0.3 + 0.8*t";
double int_h1(double T) { return 0.4 * T + 0.3 * T * T; }
double int_h2(double T) { return -0.3 * T + 0.4 * T * T; }

void criterion_6(CriterionResult& r, const Options&) {
    const double hr[4][2] = {{0.5, 0.0}, {0.5, 0.7}, {0.3, 0.5}, {0.7, -0.4}};
    double worst = 0.0;
    for (const auto& p : hr) {
        const auto m = model(p[0], p[1], 0.2, -0.1, 1.0, kTimeOnlyH1, kTimeOnlyH2);
        for (int k = 0; k < 10; ++k) {
            const double angle = 2.0 * std::numbers::pi * k / 10.0;
            const double radius = 0.3 + 0.15 * k;
            const double x = m.x0 + int_h1(m.T) + radius * std::cos(angle);
            const double y = m.y0 + int_h2(m.T) + radius * std::sin(angle);
            const auto a = density::approx_density(m, x, y, 400);
            const double exact = gaussian_oracle(m, x, y, int_h1(m.T), int_h2(m.T));
            worst = std::max(worst, std::abs(a.p_hat_full / exact - 1.0));
        }
    }
    r.passed = worst <= 1e-8;
    r.detail = fmt("max relative error of phi*exp(omega_full) %.3e (limit 1e-8) over 40 endpoints", worst);
}

void criterion_7(CriterionResult& r, const Options& o) {
    mc::SimConfig cfg;
    cfg.n_paths = o.quick ? 50000 : 500000;
    cfg.n_steps = 128;
    cfg.seed = o.seed;
    bool ok = true;
    double worst = 0.0;
    for (double H : {0.3, 0.5, 0.7}) {
        const auto m = model(H, 0.5, 0.0, 0.0, 0.1, "0", "0");
        const auto ens = mc::simulate_forward(m, cfg);
        const double sx = std::sqrt(m.T);
        const double sy = std::pow(m.T, H);
        const mc::Estimator est{mc::EstimatorKind::KDE, 0.1 * sx, 0.1 * sy};
        for (auto [u, v] : {std::pair{0.0, 0.0}, std::pair{0.5, 0.5}, std::pair{-0.8, 0.4}}) {
            const double x = u * sx;
            const double y = v * sy;
            const auto e = mc::estimate_density_at(ens, x, y, est);
            const double phi = density::gaussian_prefactor(x, y, m);
            const double tol = 3.0 * e.std_err + 0.05 * phi;
            worst = std::max(worst, std::abs(e.value - phi) / tol);
            ok = ok && std::abs(e.value - phi) <= tol;
        }
    }
    r.passed = ok;
    r.detail = fmt("%lld paths: max |estimate - phi| / (3 s.e. + 0.05 phi) = %.3f (limit 1)",
                   static_cast<long long>(cfg.n_paths), worst);
}

void criterion_8(CriterionResult& r, const Options& o) {
    mc::SimConfig cfg;
    cfg.n_paths = o.quick ? 10000 : 100000;
    cfg.n_steps = o.quick ? 128 : 256;
    cfg.seed = o.seed;
    bool ok = true;
    double worst = 0.0;
    for (double rho : {0.0, 0.7}) {
        const auto m = model(0.5, rho, 0.2, -0.1, 1.0, kTimeOnlyH1, kTimeOnlyH2);
        for (auto [x, y] : {std::pair{0.9, 0.3}, std::pair{0.1, 0.8}}) {
            const auto b = mc::bridge_mc_density(m, x, y, cfg);
            const double exact = gaussian_oracle(m, x, y, int_h1(m.T), int_h2(m.T));
            const double tol = 2.0 * (b.std_err + b.discretization_bias);
            worst = std::max(worst, std::abs(b.value - exact) / tol);
            ok = ok && std::abs(b.value - exact) <= tol;
        }
    }
    r.passed = ok;
    r.detail = fmt("%lld paths, %d steps: max |estimate - exact| / (2 (s.e. + bias)) = %.3f (limit 1)",
                   static_cast<long long>(cfg.n_paths), cfg.n_steps, worst);
}

void criterion_9(CriterionResult& r, const Options& o) {
    mc::SimConfig cfg;
    cfg.n_paths = o.quick ? 100000 : 1000000;
    cfg.n_steps = 128;
    cfg.seed = o.seed;
    std::vector<double> gap, noise;
    std::string trail;
    for (double T : {0.4, 0.2, 0.1}) {
        const auto m = model(0.4, 0.3, 0.0, 0.0, T, "0.5*sin(x)", "0.5*cos(y)");
        const double x = std::sqrt(T);
        const double y = std::pow(T, 0.4);
        const double p_hat = density::approx_density(m, x, y, 1000).p_hat;
        const auto ens = mc::simulate_forward(m, cfg);
        const auto e = mc::estimate_density_at(ens, x, y, {mc::EstimatorKind::KDE, 0.1 * x, 0.1 * y});
        gap.push_back(std::abs(e.value / p_hat - 1.0));
        noise.push_back(e.std_err / p_hat);
        trail += fmt(" T=%g: %.4f", T, gap.back());
    }
    bool ok = true;
    for (std::size_t k = 0; k + 1 < gap.size(); ++k)
        ok = ok && gap[k + 1] <= gap[k] + 2.0 * std::hypot(noise[k], noise[k + 1]);
    r.passed = ok;
    r.detail = fmt("%lld paths; |p_MC/p_hat - 1| non-increasing within 2 combined s.e.:", static_cast<long long>(cfg.n_paths)) + trail;
}

void criterion_10(CriterionResult& r, const Options&) {
    const auto curves = figure_grid();
    bool ok = curves.size() == 16;
    double worst_pin = 0.0;
    double worst_line = 0.0;
    double worst_jump_ratio = 0.0;
    for (const auto& c : curves) {
        const auto k = check_curve(c);
        worst_pin = std::max(worst_pin, k.endpoint_error);
        worst_jump_ratio = std::max(worst_jump_ratio, k.max_jump / k.jump_limit);
        if (c.hurst == 0.49) worst_line = std::max(worst_line, k.line_deviation);
    }
    ok = ok && worst_pin <= 1e-10 && worst_jump_ratio <= 1.0 && worst_line <= 0.05;
    r.passed = ok;
    r.detail = fmt("%zu curves at n=%d; pinning %.2e (1e-10); max jump / limit %.3f (1); H=0.49 line deviation %.4f (0.05)",
                   curves.size(), kFigureSteps, worst_pin, worst_jump_ratio, worst_line);
}

void criterion_11(CriterionResult& r, const Options& o) {
    const auto m = model(0.35, -0.3, 0.1, 0.2, 0.5, "0.5*sin(x) - 0.2*y", "cos(t) + 0.1*x");
    mc::SimConfig cfg;
    cfg.n_paths = 3000;
    cfg.n_steps = 64;
    cfg.chunk_size = 256;
    cfg.seed = o.seed;
    auto run_with = [&](int workers) {
        set_worker_count(workers);
        auto ens = mc::simulate_forward(m, cfg);
        auto b = mc::bridge_mc_density(m, 0.4, 0.5, cfg);
        return std::pair{std::move(ens), b};
    };
    const auto first = run_with(1);
    const auto again = run_with(1);
    const auto parallel = run_with(4);
    set_worker_count(0);
    auto same = [](const auto& a, const auto& b) {
        return a.first.terminal_x == b.first.terminal_x && a.first.terminal_y == b.first.terminal_y &&
               a.second.value == b.second.value && a.second.std_err == b.second.std_err &&
               a.second.discretization_bias == b.second.discretization_bias;
    };
    const bool repeat = same(first, again);
    const bool workers = same(first, parallel);
    r.passed = repeat && workers;
    r.detail = fmt("repeated run identical: %s; 1 vs 4 workers identical: %s", repeat ? "yes" : "no", workers ? "yes" : "no");
}

struct Entry {
    const char* name;
    double budget;
    void (*fn)(CriterionResult&, const Options&);
};

constexpr Entry kEntries[kCriterionCount] = {
    {"kernel integral identity", 10, criterion_1},
    {"kernel form equivalence", 30, criterion_2},
    {"operator round trip", 60, criterion_3},
    {"modal path structure", 5, criterion_4},
    {"conditional Gaussian", 30, criterion_5},
    {"time-only exactness", 10, criterion_6},
    {"forward MC vs prefactor", 180, criterion_7},
    {"bridge MC vs exact", 300, criterion_8},
    {"asymptotic trend", 900, criterion_9},
    {"figure grid", 10, criterion_10},
    {"determinism", 60, criterion_11},
};

}  // namespace

bool Report::all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

std::vector<FigureCurve> figure_grid(int n) {
    const fbm::TimeGrid grid(1.0, n);
    std::vector<FigureCurve> out;
    for (double rho : kFigureRhos)
        for (double H : kFigureHursts) {
            const auto m = model(H, rho, 0.0, 0.0, 1.0, "0", "0");
            out.push_back({H, rho, bridge::modal_path(m, grid, 1.0, 1.0)});
        }
    return out;
}

CurveChecks check_curve(const FigureCurve& c) {
    CurveChecks k;
    k.jump_limit = c.hurst < 0.25 ? 0.6 : 0.05;
    const auto& p = c.path;
    const std::size_t size = p.x_path.size();
    for (std::size_t i = 0; i < size; ++i) {
        const double s = p.grid.node(static_cast<int>(i)) / p.grid.T;
        k.line_deviation = std::max({k.line_deviation, std::abs(p.x_path[i] - s * p.x), std::abs(p.y_path[i] - s * p.y)});
        if (i > 0)
            k.max_jump = std::max({k.max_jump, std::abs(p.x_path[i] - p.x_path[i - 1]), std::abs(p.y_path[i] - p.y_path[i - 1])});
    }
    k.endpoint_error = std::max({std::abs(p.x_path.front()), std::abs(p.y_path.front()), std::abs(p.x_path.back() - p.x),
                                 std::abs(p.y_path.back() - p.y)});
    return k;
}

CriterionResult run_criterion(int id, const Options& options) {
    if (id < 1 || id > kCriterionCount) throw DomainError("criterion id must be between 1 and 11");
    const Entry& e = kEntries[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = e.name;
    r.budget_seconds = e.budget;
    const auto start = std::chrono::steady_clock::now();
    try {
        e.fn(r, options);
    } catch (const std::exception& ex) {
        r.passed = false;
        r.detail = std::string("error: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.passed && r.seconds > r.budget_seconds) {
        r.passed = false;
        r.detail += fmt("; runtime %.1f s exceeds the %.0f s budget", r.seconds, r.budget_seconds);
    }
    return r;
}

Report run(const Options& options) {
    Report report;
    report.quick = options.quick;
    for (int id = 1; id <= kCriterionCount; ++id) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) continue;
        report.results.push_back(run_criterion(id, options));
    }
    return report;
}

}  // namespace modalbridge::validate
