#include "modalbridge/mc.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "modalbridge/bridge.hpp"
#include "modalbridge/density.hpp"
#include "modalbridge/errors.hpp"
#include "modalbridge/fbm_kernel.hpp"
#include "modalbridge/fraccalc.hpp"
#include "modalbridge/parallel.hpp"

namespace modalbridge::mc {

namespace {

constexpr double kMemoryBudgetBytes = 4.0 * 1024 * 1024 * 1024;

std::int64_t chunk_count(std::int64_t n_paths, int chunk) { return (n_paths + chunk - 1) / chunk; }

[[noreturn]] void path_failure(std::int64_t path, int step, const Error& e) {
    throw Error(ErrorKind::Evaluation,
                "drift evaluation failed on path " + std::to_string(path) + " at step " + std::to_string(step) + ": " + e.what());
}

}  // namespace

void SimConfig::validate() const {
    if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
    if (n_steps < 2) throw ConfigError("n_steps must be at least 2");
    if (chunk_size < 1) throw ConfigError("chunk_size must be at least 1");
    if (!(estimator.wx > 0.0) || !(estimator.wy > 0.0) || !std::isfinite(estimator.wx) || !std::isfinite(estimator.wy))
        throw ConfigError("estimator widths must be positive and finite");
    double bytes = 16.0 * static_cast<double>(n_paths);
    if (keep_paths) bytes += 16.0 * static_cast<double>(n_paths) * (n_steps + 1.0);
    if (bytes > kMemoryBudgetBytes) throw ConfigError("n_paths x n_steps exceeds the 4 GiB memory budget");
}

std::string model_fingerprint(const drift::ModelSpec& model) {
    std::ostringstream s;
    s.precision(17);
    s << "H=" << model.H() << ";rho=" << model.rho << ";x0=" << model.x0 << ";y0=" << model.y0 << ";T=" << model.T
      << ";h1=" << drift::print_drift(model.h1) << ";h2=" << drift::print_drift(model.h2);
    // FNV-1a, printed in hex
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

PathEnsemble simulate_forward(const drift::ModelSpec& model, const SimConfig& config) {
    config.validate();
    drift::check_model(model);
    const int n = config.n_steps;
    const fbm::TimeGrid grid(model.T, n);
    const double dt = grid.dt();
    const double sdt = std::sqrt(dt);
    const bool brownian = model.hurst.is_brownian();
    const Eigen::MatrixXd chol =
        brownian ? Eigen::MatrixXd() : fbm::jittered_cholesky(fbm::joint_cov_matrix(grid, model.hurst));

    PathEnsemble out;
    out.seed = config.seed;
    out.fingerprint = model_fingerprint(model);
    if (model.drift_class == drift::DriftClass::General) {
        const auto report = drift::validate_assumptions(model, drift::default_box(model), 200, config.seed);
        if (model.T >= report.contraction_horizon) {
            std::ostringstream msg;
            msg << "T = " << model.T << " is not below the sampled contraction horizon 1/(2L) = " << report.contraction_horizon;
            out.warnings.push_back(msg.str());
        }
    }
    const auto total = static_cast<std::size_t>(config.n_paths);
    out.terminal_x.assign(total, 0.0);
    out.terminal_y.assign(total, 0.0);
    if (config.keep_paths) {
        out.paths_x.assign(total * static_cast<std::size_t>(n + 1), 0.0);
        out.paths_y.assign(total * static_cast<std::size_t>(n + 1), 0.0);
    }
    const double rho = model.rho;
    const double rb = model.rho_bar();

    parallel_for(0, chunk_count(config.n_paths, config.chunk_size), [&](std::int64_t c) {
        const std::int64_t first = c * config.chunk_size;
        const auto m = static_cast<Eigen::Index>(std::min<std::int64_t>(config.chunk_size, config.n_paths - first));
        auto engine = stream_engine(config.seed, static_cast<std::uint64_t>(c));
        std::normal_distribution<double> normal;
        const int dim = brownian ? n : 2 * n;
        Eigen::MatrixXd z(dim, m);
        for (Eigen::Index p = 0; p < m; ++p)
            for (int i = 0; i < dim; ++i) z(i, p) = normal(engine);
        Eigen::MatrixXd w(n, m);
        for (Eigen::Index p = 0; p < m; ++p)
            for (int i = 0; i < n; ++i) w(i, p) = sdt * normal(engine);
        // Node values of B (rows 0..n-1 = t_1..t_n) and B^H.
        Eigen::MatrixXd bnodes, bhnodes;
        if (brownian) {
            bnodes = z * sdt;
            for (int i = 1; i < n; ++i) bnodes.row(i) += bnodes.row(i - 1);
            bhnodes = bnodes;
        } else {
            const Eigen::MatrixXd v = chol.triangularView<Eigen::Lower>() * z;
            bnodes = v.topRows(n);
            bhnodes = v.bottomRows(n);
        }
        std::vector<double> xs(static_cast<std::size_t>(n) + 1), ys(static_cast<std::size_t>(n) + 1);
        for (Eigen::Index p = 0; p < m; ++p) {
            const std::int64_t path = first + p;
            double x = model.x0;
            double drift2 = 0.0;
            xs[0] = x;
            ys[0] = model.y0;
            double b_prev = 0.0;
            for (int i = 0; i < n; ++i) {
                const double t = grid.node(i);
                const auto ui = static_cast<std::size_t>(i);
                double d1 = 0.0;
                double d2 = 0.0;
                try {
                    d1 = model.h1(t, xs[ui], ys[ui]);
                    d2 = model.h2(t, xs[ui], ys[ui]);
                } catch (const Error& e) {
                    path_failure(path, i, e);
                }
                const double db = bnodes(i, p) - b_prev;
                b_prev = bnodes(i, p);
                x += rho * db + rb * w(i, p) + d1 * dt;
                drift2 += d2 * dt;
                xs[ui + 1] = x;
                ys[ui + 1] = model.y0 + bhnodes(i, p) + drift2;
            }
            const auto up = static_cast<std::size_t>(path);
            out.terminal_x[up] = xs.back();
            out.terminal_y[up] = ys.back();
            if (config.keep_paths) {
                const std::size_t row = up * static_cast<std::size_t>(n + 1);
                std::copy(xs.begin(), xs.end(), out.paths_x.begin() + static_cast<std::ptrdiff_t>(row));
                std::copy(ys.begin(), ys.end(), out.paths_y.begin() + static_cast<std::ptrdiff_t>(row));
            }
        }
    });
    return out;
}

DensityEstimate estimate_density_at(const PathEnsemble& ensemble, double x, double y, const Estimator& est) {
    const auto n = static_cast<std::int64_t>(ensemble.terminal_x.size());
    if (n == 0) throw DomainError("estimate_density_at: empty ensemble");
    if (!(est.wx > 0.0) || !(est.wy > 0.0)) throw DomainError("estimate_density_at: widths must be positive");
    const double nd = static_cast<double>(n);
    DensityEstimate out;
    if (est.kind == EstimatorKind::Bin) {
        const double area = est.wx * est.wy;
        std::int64_t hits = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            if (std::abs(ensemble.terminal_x[u] - x) <= 0.5 * est.wx && std::abs(ensemble.terminal_y[u] - y) <= 0.5 * est.wy)
                ++hits;
        }
        const double p = static_cast<double>(hits) / nd;
        out.value = p / area;
        out.std_err = hits == 0 ? 3.0 / (nd * area) : std::sqrt(p * (1.0 - p) / nd) / area;
        out.n_effective = hits;
        return out;
    }
    const double norm = 1.0 / (2.0 * std::numbers::pi * est.wx * est.wy);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double a = (ensemble.terminal_x[u] - x) / est.wx;
        const double b = (ensemble.terminal_y[u] - y) / est.wy;
        const double k = norm * std::exp(-0.5 * (a * a + b * b));
        sum += k;
        sum_sq += k * k;
    }
    out.value = sum / nd;
    const double var = n > 1 ? std::max(0.0, (sum_sq - nd * out.value * out.value) / (nd - 1.0)) : 0.0;
    out.std_err = std::sqrt(var / nd);
    out.n_effective = sum_sq > 0.0 ? static_cast<std::int64_t>(sum * sum / sum_sq) : 0;
    return out;
}

namespace {

struct WeightStats {
    double mean = 0.0;
    double sd = 0.0;
};

// Mean and standard deviation of the Girsanov weight under the bridge measure with n steps.
WeightStats bridge_weights(const drift::ModelSpec& model, double x, double y, const SimConfig& config, int n) {
    const fbm::TimeGrid grid(model.T, n);
    const double dt = grid.dt();
    const double H = model.H();
    const bool brownian = model.hurst.is_brownian();
    const double rho = model.rho;
    const double rb = model.rho_bar();

    // Volterra weights w(i, j) = ∫_{t_j}^{t_{j+1}} K_H(t_i, s) ds / dt, lower triangle i > j.
    Eigen::MatrixXd vw = Eigen::MatrixXd::Zero(n + 1, n);
    if (brownian) {
        for (int i = 1; i <= n; ++i) vw.row(i).head(i).setOnes();
    } else {
        const auto table = fbm::cell_table(n, model.hurst);
        const double scale = std::pow(dt, H + 0.5) / dt;
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j < i; ++j) vw(i, j) = table->m0(i, j) * scale;
    }
    // B^H_T = Σ_j w(n, j) ΔB_j + R with R independent of the increments.
    const double var_r = std::max(0.0, std::pow(model.T, 2.0 * H) - vw.row(n).squaredNorm() * dt);

    // V = (ΔB_0..ΔB_{n-1}, ΔW_0..ΔW_{n-1}, R); constraints A V = (x - x0, y - y0).
    const int d = 2 * n + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, d);
    A.row(0).head(n).setConstant(rho);
    A.row(0).segment(n, n).setConstant(rb);
    A.row(1).head(n) = vw.row(n);
    A(1, 2 * n) = 1.0;
    Eigen::VectorXd var_v = Eigen::VectorXd::Constant(d, dt);
    var_v(2 * n) = var_r;
    bridge::GaussianConditioner g;
    g.mean = Eigen::VectorXd::Zero(d + 2);
    g.cov = Eigen::MatrixXd::Zero(d + 2, d + 2);
    g.cov.topLeftCorner(d, d) = var_v.asDiagonal();
    const Eigen::MatrixXd sa = var_v.asDiagonal() * A.transpose();
    g.cov.topRightCorner(d, 2) = sa;
    g.cov.bottomLeftCorner(2, d) = sa.transpose();
    g.cov.bottomRightCorner(2, 2) = A * sa;
    g.observed_indices = {d, d + 1};
    g.observed_values = Eigen::Vector2d(x - model.x0, y - model.y0);
    const Eigen::MatrixXd gain = bridge::condition_gaussian(g).gain;
    const Eigen::Vector2d target(x - model.x0, y - model.y0);

    const bool time_only = model.drift_class == drift::DriftClass::TimeOnly;
    std::vector<double> fixed_h2;
    if (time_only) {
        std::vector<double> v(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = model.h2(grid.node(i), 0.0, 0.0);
        fixed_h2 = fraccalc::invert_KH_from_derivative(fraccalc::GridFunction(grid, std::move(v)), model.hurst).values;
    }

    const std::int64_t chunks = chunk_count(config.n_paths, config.chunk_size);
    std::vector<double> sums(static_cast<std::size_t>(chunks)), squares(static_cast<std::size_t>(chunks));
    parallel_for(0, chunks, [&](std::int64_t c) {
        const std::int64_t first = c * config.chunk_size;
        const std::int64_t m = std::min<std::int64_t>(config.chunk_size, config.n_paths - first);
        auto engine = stream_engine(config.seed, static_cast<std::uint64_t>(c));
        std::normal_distribution<double> normal;
        const double sdt = std::sqrt(dt);
        const double sr = std::sqrt(var_r);
        Eigen::VectorXd v(d);
        std::vector<double> xs(static_cast<std::size_t>(n) + 1), ys(static_cast<std::size_t>(n) + 1);
        std::vector<double> h1v(static_cast<std::size_t>(n) + 1), h2v(static_cast<std::size_t>(n) + 1);
        double s = 0.0;
        double s2 = 0.0;
        for (std::int64_t p = 0; p < m; ++p) {
            for (int i = 0; i < 2 * n; ++i) v(i) = sdt * normal(engine);
            v(2 * n) = sr * normal(engine);
            v += gain * (target - A * v);

            xs[0] = model.x0;
            for (int i = 0; i < n; ++i)
                xs[static_cast<std::size_t>(i) + 1] = xs[static_cast<std::size_t>(i)] + rho * v(i) + rb * v(n + i);
            ys[0] = model.y0;
            if (brownian) {
                double acc = model.y0;
                for (int i = 0; i < n; ++i) ys[static_cast<std::size_t>(i) + 1] = acc += v(i);
            } else {
                for (int i = 1; i <= n; ++i) ys[static_cast<std::size_t>(i)] = model.y0 + vw.row(i).head(i).dot(v.head(i));
            }
            ys[static_cast<std::size_t>(n)] += v(2 * n);

            try {
                for (int i = 0; i <= n; ++i) {
                    const auto u = static_cast<std::size_t>(i);
                    const double t = grid.node(i);
                    h1v[u] = model.h1(t, xs[u], ys[u]);
                    if (!time_only) h2v[u] = model.h2(t, xs[u], ys[u]);
                }
            } catch (const Error& e) {
                path_failure(first + p, 0, e);
            }
            const std::vector<double>& tilde2 =
                time_only ? fixed_h2
                          : fraccalc::invert_KH_from_derivative(fraccalc::GridFunction(grid, h2v), model.hurst).values;
            double expo = 0.0;
            for (int i = 0; i < n; ++i) {
                const auto u = static_cast<std::size_t>(i);
                const double t1 = (h1v[u] - rho * tilde2[u]) / rb;
                const double t2 = tilde2[u];
                expo += t1 * v(n + i) - 0.5 * t1 * t1 * dt + t2 * v(i) - 0.5 * t2 * t2 * dt;
            }
            const double weight = std::exp(expo);
            s += weight;
            s2 += weight * weight;
        }
        sums[static_cast<std::size_t>(c)] = s;
        squares[static_cast<std::size_t>(c)] = s2;
    });
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t c = 0; c < sums.size(); ++c) {
        s += sums[c];
        s2 += squares[c];
    }
    const double nd = static_cast<double>(config.n_paths);
    WeightStats out;
    out.mean = s / nd;
    out.sd = config.n_paths > 1 ? std::sqrt(std::max(0.0, (s2 - nd * out.mean * out.mean) / (nd - 1.0))) : 0.0;
    return out;
}

}  // namespace

BridgeEstimate bridge_mc_density(const drift::ModelSpec& model, double x, double y, const SimConfig& config) {
    config.validate();
    drift::check_model(model);
    if (model.H() > fraccalc::kMaxInvertHurst)
        throw UnsupportedError("bridge_mc_density: H above 0.95 is outside the supported range of the inverse operator");
    const double phi = density::gaussian_prefactor(x - model.x0, y - model.y0, model);
    const WeightStats full = bridge_weights(model, x, y, config, config.n_steps);
    BridgeEstimate out;
    out.n_paths = config.n_paths;
    out.value = phi * full.mean;
    out.std_err = phi * full.sd / std::sqrt(static_cast<double>(config.n_paths));
    if (config.n_steps >= 4) {
        const WeightStats half = bridge_weights(model, x, y, config, config.n_steps / 2);
        out.discretization_bias = std::abs(out.value - phi * half.mean);
    }
    return out;
}

}  // namespace modalbridge::mc
