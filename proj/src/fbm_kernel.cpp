#include "modalbridge/fbm_kernel.hpp"

#include <Eigen/Cholesky>
#include <atomic>
#include <cmath>
#include <random>
#include <string>

#include "modalbridge/errors.hpp"
#include "modalbridge/parallel.hpp"
#include "modalbridge/quadrature.hpp"
#include "modalbridge/specialfn.hpp"
#include "singular_cells.hpp"

namespace modalbridge::fbm {

namespace {

std::atomic<double> kappa_fault{1.0};

const specialfn::PrecisionPolicy kSeriesPolicy{1e-15, 100000};

// Splitting of the kernel used by the quadratures. For r = s/t:
//   r <= 1/2:  K = cA s^(H-1/2) + s^(1/2-H) G(s),
//              G(s) = cB t^(H-1/2) (t-s)^(H-1/2) F(1, 1/2-H; 2-2H; r)
//   r >= 1/2:  K = (t-s)^(H-1/2) S(s),
//              S(s) = c_H r^(H-1/2) F(H-1/2, 2H; H+1/2; 1-r)
// The first line is the linear transformation of the Pfaff-transformed series to
// the s = 0 end; the coefficients are
//   cA = c_H Γ(H+1/2) Γ(1-2H) / Γ(1/2-H),  cB = c_H Γ(H+1/2) Γ(2H-1) / (Γ(H-1/2) Γ(2H)).
struct KernelSplit {
    double H;
    double c;
    double cA;
    double cB;

    explicit KernelSplit(const Hurst& hurst) : H(hurst.value()), c(hurst.c()) {
        using specialfn::detail::gamma_any;
        const double gh = gamma_any(H + 0.5);
        cA = c * gh * gamma_any(1.0 - 2.0 * H) / gamma_any(0.5 - H);
        cB = c * gh * gamma_any(2.0 * H - 1.0) / (gamma_any(H - 0.5) * gamma_any(2.0 * H));
    }

    double left_regular(double t, double s) const {
        const double r = s / t;
        return cB * std::pow(t * (t - s), H - 0.5) *
               specialfn::detail::hyp2f1_series(1.0, 0.5 - H, 2.0 - 2.0 * H, r, kSeriesPolicy);
    }

    double right_regular(double t, double s) const {
        const double r = s / t;
        const double w = (t - s) / t;
        return c * std::pow(r, H - 0.5) * specialfn::detail::hyp2f1_series(H - 0.5, 2.0 * H, H + 0.5, w, kSeriesPolicy);
    }

    double value(double t, double s) const {
        if (2.0 * s <= t) return cA * std::pow(s, H - 0.5) + std::pow(s, 0.5 - H) * left_regular(t, s);
        return std::pow(t - s, H - 0.5) * right_regular(t, s);
    }

    // ∫_0^b K(s) (1, s - ref) ds for b <= t/2.
    CellMoments left_block(double t, double b, double ref) const {
        CellMoments out;
        if (b <= 0.0) return out;
        const double p1 = H + 0.5;
        const double p2 = H + 1.5;
        const double bp1 = std::pow(b, p1);
        out.m0 = cA * bp1 / p1;
        out.m1 = cA * (bp1 * b / p2 - ref * bp1 / p1);
        const auto& rule = quadrature::gauss_jacobi(20, 0.0, 0.5 - H);
        const double half = 0.5 * b;
        const double scale = std::pow(half, 1.5 - H);
        double s0 = 0.0;
        double s1 = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = half * (1.0 + rule.nodes[i]);
            const double g = rule.weights[i] * left_regular(t, s);
            s0 += g;
            s1 += g * (s - ref);
        }
        out.m0 += scale * s0;
        out.m1 += scale * s1;
        return out;
    }

    // ∫_a^t K(s) (1, s - ref) ds for a >= t/2.
    CellMoments right_block(double t, double a, double ref) const {
        CellMoments out;
        if (a >= t) return out;
        const auto& rule = quadrature::gauss_jacobi(20, H - 0.5, 0.0);
        const double half = 0.5 * (t - a);
        const double scale = std::pow(half, H + 0.5);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = t - half * (1.0 - rule.nodes[i]);
            const double g = rule.weights[i] * right_regular(t, s);
            out.m0 += g;
            out.m1 += g * (s - ref);
        }
        out.m0 *= scale;
        out.m1 *= scale;
        return out;
    }
};

void check_time_pair(const char* who, double t, double s) {
    if (!(s > 0.0) || !(s < t))
        throw DomainError(std::string(who) + ": requires 0 < s < t, got t=" + std::to_string(t) +
                          ", s=" + std::to_string(s));
}

}  // namespace

void set_kappa_fault_factor(double factor) noexcept { kappa_fault.store(factor); }

Hurst::Hurst(double H) : H_(H) {
    if (!(H > 0.0 && H < 1.0)) throw DomainError("Hurst exponent must lie in (0,1), got " + std::to_string(H));
    if (H == 0.5) {
        c_H_ = 1.0;
        kappa_H_ = 1.0;
        return;
    }
    using specialfn::gamma_fn;
    c_H_ = std::sqrt(2.0 * H * gamma_fn(1.5 - H) / (gamma_fn(2.0 - 2.0 * H) * gamma_fn(H + 0.5)));
    kappa_H_ = c_H_ * specialfn::beta_fn(1.5 - H, H + 0.5) / (H + 0.5);
}

double Hurst::kappa() const noexcept { return kappa_H_ * kappa_fault.load(); }

TimeGrid::TimeGrid(double horizon, int steps) : T(horizon), n(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("TimeGrid: horizon must be positive");
    if (steps < 1) throw DomainError("TimeGrid: need at least one step");
}

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) out[static_cast<std::size_t>(i)] = node(i);
    return out;
}

double kernel_hyp(double t, double s, const Hurst& hurst) {
    check_time_pair("kernel_hyp", t, s);
    if (hurst.is_brownian()) return 1.0;
    const double H = hurst.value();
    return hurst.c() * std::pow(t - s, H - 0.5) * specialfn::hyp2f1(H - 0.5, 0.5 - H, H + 0.5, 1.0 - t / s);
}

double kernel_alt(double t, double s, const Hurst& hurst) {
    check_time_pair("kernel_alt", t, s);
    if (hurst.is_brownian()) return 1.0;
    const double H = hurst.value();
    auto integrand = [H](double u) { return std::pow(u, H - 1.5); };
    // First panel carries the (u-s)^(H-1/2) weight; later panels grow geometrically
    // away from the u^(H-3/2) singularity at the origin and are smooth.
    double upper = std::min(t, 3.0 * s);
    double inner = quadrature::left_weighted(integrand, s, upper, H - 0.5, 40);
    while (upper < t) {
        const double next = std::min(t, 3.0 * upper);
        const double a = upper;
        inner += quadrature::legendre([&](double u) { return integrand(u) * std::pow(u - s, H - 0.5); }, a, next, 20);
        upper = next;
    }
    return hurst.c() *
           (std::pow(t / s, H - 0.5) * std::pow(t - s, H - 0.5) - (H - 0.5) * std::pow(s, 0.5 - H) * inner);
}

double autocovariance(double s, double t, const Hurst& hurst) {
    if (!(s >= 0.0) || !(t >= 0.0)) throw DomainError("autocovariance: times must be nonnegative");
    if (hurst.is_brownian()) return std::min(s, t);
    const double two_h = 2.0 * hurst.value();
    return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(t - s), two_h));
}

double kernel_total_integral(double t, const Hurst& hurst) {
    if (!(t > 0.0)) throw DomainError("kernel_total_integral: t must be positive");
    return hurst.kappa() * std::pow(t, hurst.value() + 0.5);
}

double kernel_partial_integral(double tau, double t, const Hurst& hurst) {
    if (!(t > 0.0)) throw DomainError("kernel_partial_integral: t must be positive");
    if (!(tau >= 0.0) || !(tau <= t))
        throw DomainError("kernel_partial_integral: tau must lie in [0, t], got " + std::to_string(tau));
    if (tau == 0.0) return 0.0;
    if (hurst.is_brownian()) return tau;
    return detail::singular_moments(KernelSplit(hurst), t, 0.0, tau, 0.0).m0;
}

CellMoments kernel_cell_moments(double t, double a, double b, const Hurst& hurst) {
    if (!(t > 0.0) || !(a >= 0.0) || !(b <= t) || !(a <= b))
        throw DomainError("kernel_cell_moments: need 0 <= a <= b <= t");
    if (hurst.is_brownian()) return {b - a, 0.5 * (b - a) * (b - a)};
    return detail::singular_moments(KernelSplit(hurst), t, a, b, a);
}

KernelCellTable::KernelCellTable(int n, const Hurst& hurst) : n_(n), H_(hurst.value()) {
    if (n < 1) throw DomainError("KernelCellTable: n must be positive");
    const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
    m0_.assign(total, 0.0);
    m1_.assign(total, 0.0);
    if (hurst.is_brownian()) {
        std::fill(m0_.begin(), m0_.end(), 1.0);
        std::fill(m1_.begin(), m1_.end(), 0.5);
        return;
    }
    const KernelSplit split(hurst);
    parallel_for(1, n + 1, [&](std::int64_t kk) {
        const int k = static_cast<int>(kk);
        const double t = static_cast<double>(k);
        for (int j = 0; j < k; ++j) {
            const double a = static_cast<double>(j);
            const CellMoments mom = detail::singular_moments(split, t, a, a + 1.0, a);
            m0_[index(k, j)] = mom.m0;
            m1_[index(k, j)] = mom.m1;
        }
    });
}

std::shared_ptr<const KernelCellTable> cell_table(int n, const Hurst& hurst) {
    // Large tables are tens of megabytes; the cache keeps only a handful alive.
    static detail::TableCache<KernelCellTable> cache;
    return cache.get({n, hurst.value(), 0.0}, [&] { return std::make_shared<const KernelCellTable>(n, hurst); });
}

Eigen::MatrixXd joint_cov_matrix(const TimeGrid& grid, const Hurst& hurst) {
    const int n = grid.n;
    Eigen::MatrixXd cov(2 * n, 2 * n);
    const double dt = grid.dt();
    const auto table = cell_table(n, hurst);
    const double scale = std::pow(dt, hurst.value() + 0.5);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const double ti = grid.node(i);
            const double tj = grid.node(j);
            cov(i - 1, j - 1) = std::min(ti, tj);
            cov(n + i - 1, n + j - 1) = autocovariance(ti, tj, hurst);
        }
    }
    // Cov(B_{t_i}, B^H_{t_j}) = ∫_0^{min(t_i,t_j)} K_H(t_j, u) du.
    for (int j = 1; j <= n; ++j) {
        double running = 0.0;
        for (int i = 1; i <= n; ++i) {
            if (i <= j) running += table->m0(j, i - 1) * scale;
            cov(i - 1, n + j - 1) = running;
            cov(n + j - 1, i - 1) = running;
        }
    }
    return cov;
}

Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    const double trace = cov.trace();
    const Eigen::Index dim = cov.rows();
    for (double eps = 1e-14 * trace; eps <= 1e-10 * trace * (1.0 + 1e-12); eps *= 2.0) {
        Eigen::MatrixXd shifted = cov;
        shifted.diagonal().array() += eps;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw ConditioningError("covariance matrix of dimension " + std::to_string(dim) +
                            " is not positive definite after jitter up to 1e-10 * trace");
}

JointPaths sample_joint_paths(const TimeGrid& grid, const Hurst& hurst, std::uint64_t seed, int count) {
    if (count < 1) throw DomainError("sample_joint_paths: count must be at least 1");
    const int n = grid.n;
    JointPaths out{grid, Eigen::MatrixXd::Zero(count, n + 1), Eigen::MatrixXd::Zero(count, n + 1)};
    auto engine = stream_engine(seed, 0);
    std::normal_distribution<double> normal;
    if (hurst.is_brownian()) {
        const double sd = std::sqrt(grid.dt());
        for (int p = 0; p < count; ++p)
            for (int i = 1; i <= n; ++i) out.brownian(p, i) = out.brownian(p, i - 1) + sd * normal(engine);
        out.fractional = out.brownian;
        return out;
    }
    const Eigen::MatrixXd chol = jittered_cholesky(joint_cov_matrix(grid, hurst));
    Eigen::VectorXd z(2 * n);
    for (int p = 0; p < count; ++p) {
        for (int i = 0; i < 2 * n; ++i) z(i) = normal(engine);
        const Eigen::VectorXd v = chol.triangularView<Eigen::Lower>() * z;
        out.brownian.row(p).tail(n) = v.head(n).transpose();
        out.fractional.row(p).tail(n) = v.tail(n).transpose();
    }
    return out;
}

}  // namespace modalbridge::fbm
