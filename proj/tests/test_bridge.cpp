#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "modalbridge/bridge.hpp"
#include "modalbridge/errors.hpp"

using namespace modalbridge;
using namespace modalbridge::bridge;

namespace {

drift::ModelSpec zero_model(double H, double rho, double T = 1.0) {
    return drift::make_model(H, rho, 0.0, 0.0, T, drift::DriftExpr(), drift::DriftExpr());
}

}  // namespace

TEST_CASE("conditioning with independent blocks leaves the free block unchanged") {
    GaussianConditioner g;
    g.mean = Eigen::Vector3d(1.0, 2.0, 3.0);
    g.cov = Eigen::Matrix3d::Zero();
    g.cov(0, 0) = 2.0;
    g.cov(1, 1) = 3.0;
    g.cov(0, 1) = g.cov(1, 0) = 0.5;
    g.cov(2, 2) = 4.0;
    g.observed_indices = {2};
    g.observed_values = Eigen::VectorXd::Constant(1, -7.0);
    const auto c = condition_gaussian(g);
    CHECK(c.free_indices == std::vector<int>{0, 1});
    CHECK(c.mean(0) == 1.0);
    CHECK(c.mean(1) == 2.0);
    CHECK(c.cov(0, 1) == 0.5);
    CHECK(c.cov(1, 1) == 3.0);
}

TEST_CASE("textbook bivariate conditioning") {
    for (double r : {-0.8, 0.3, 0.95}) {
        GaussianConditioner g;
        g.mean = Eigen::Vector2d::Zero();
        g.cov.resize(2, 2);
        g.cov << 1.0, r, r, 1.0;
        g.observed_indices = {1};
        g.observed_values = Eigen::VectorXd::Constant(1, 1.7);
        const auto c = condition_gaussian(g);
        CHECK(c.mean(0) == doctest::Approx(r * 1.7).epsilon(1e-14));
        CHECK(c.cov(0, 0) == doctest::Approx(1 - r * r).epsilon(1e-13));
        CHECK(c.gain(0, 0) == doctest::Approx(r).epsilon(1e-14));
    }
}

TEST_CASE("conditioning on a random instance matches regression on samples") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(5, 5);
    for (int i = 0; i < 25; ++i) a(i) = normal(rng);
    GaussianConditioner g;
    g.cov = a * a.transpose() + Eigen::MatrixXd::Identity(5, 5);
    g.mean = Eigen::VectorXd::Zero(5);
    g.observed_indices = {0, 3};
    g.observed_values = Eigen::Vector2d(0.5, -0.5);
    const auto c = condition_gaussian(g);
    const int n = 200000;
    const Eigen::MatrixXd L = g.cov.llt().matrixL();
    Eigen::MatrixXd design(n, 3), resp(n, 3);
    Eigen::VectorXd z(5);
    for (int s = 0; s < n; ++s) {
        for (int i = 0; i < 5; ++i) z(i) = normal(rng);
        const Eigen::VectorXd v = L * z;
        design.row(s) << 1.0, v(0), v(3);
        resp.row(s) << v(1), v(2), v(4);
    }
    const Eigen::Matrix3d gram = design.transpose() * design;
    const Eigen::MatrixXd beta = gram.ldlt().solve(design.transpose() * resp);
    const Eigen::MatrixXd res = resp - design * beta;
    const Eigen::Matrix3d inv = gram.inverse();
    for (int k = 0; k < 3; ++k) {
        const double s2 = res.col(k).squaredNorm() / (n - 3);
        for (int j = 0; j < 2; ++j) CHECK(std::abs(beta(j + 1, k) - c.gain(k, j)) < 3.0 * std::sqrt(s2 * inv(j + 1, j + 1)));
        CHECK(std::abs(s2 - c.cov(k, k)) < 3.0 * c.cov(k, k) * std::sqrt(2.0 / n));
    }
}

TEST_CASE("conditioning rejects malformed input") {
    GaussianConditioner g;
    g.mean = Eigen::Vector2d::Zero();
    g.cov = Eigen::Matrix2d::Identity();
    g.observed_indices = {2};
    g.observed_values = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_AS(condition_gaussian(g), DomainError);
    g.observed_indices = {0, 0};
    g.observed_values = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(condition_gaussian(g), DomainError);
}

TEST_CASE("covariance blocks") {
    const fbm::TimeGrid g(1.0, 10);
    const auto b = cov_blocks(zero_model(0.5, 0.4), g);
    CHECK(b.sigma_T(0, 1) == doctest::Approx(0.4));
    CHECK(b.sigma_T(1, 1) == doctest::Approx(1.0));
    for (int i = 0; i <= 10; ++i) {
        const double t = g.node(i);
        const auto& m = b.sigma_tT[static_cast<std::size_t>(i)];
        CHECK(m(0, 0) == doctest::Approx(t));
        CHECK(m(0, 1) == doctest::Approx(0.4 * t));
        CHECK(m(1, 0) == doctest::Approx(0.4 * t));
        CHECK(m(1, 1) == doctest::Approx(t));
    }
    const auto b75 = cov_blocks(zero_model(0.75, 0.7, 2.0), fbm::TimeGrid(2.0, 40));
    CHECK((b75.sigma_tT.back() - b75.sigma_T).norm() < 1e-10);
    CHECK_THROWS_AS(cov_blocks(zero_model(0.3, 0.1), fbm::TimeGrid(2.0, 4)), DomainError);
}

TEST_CASE("modal coefficients") {
    const fbm::TimeGrid g(2.0, 20);
    const auto c = modal_coeffs(zero_model(0.5, -0.6, 2.0), g);
    for (std::size_t i = 0; i < c.m11.size(); ++i) {
        const double s = g.node(static_cast<int>(i)) / 2.0;
        CHECK(c.m11[i] == doctest::Approx(s));
        CHECK(c.m22[i] == doctest::Approx(s));
        CHECK(c.m12[i] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(c.m21[i] == doctest::Approx(0.0).epsilon(1e-14));
    }
    const fbm::Hurst h(0.3);
    const auto u = modal_coeffs(zero_model(0.3, 0.0, 2.0), g);
    for (std::size_t i = 0; i < u.m11.size(); ++i) {
        const double t = g.node(static_cast<int>(i));
        CHECK(u.m11[i] == doctest::Approx(t / 2.0));
        CHECK(u.m22[i] == doctest::Approx(fbm::autocovariance(t, 2.0, h) / std::pow(2.0, 0.6)));
        CHECK(u.m12[i] == 0.0);
        CHECK(u.m21[i] == 0.0);
    }
    const auto e = modal_coeffs(zero_model(0.8, 0.5, 2.0), g);
    CHECK(e.m11.back() == doctest::Approx(1.0));
    CHECK(e.m12.back() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.m21.back() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.m22.back() == doctest::Approx(1.0));
}

TEST_CASE("modal path is the conditional mean of the pinned Gaussian pair") {
    // Condition the joint vector (X_t, Y_t, X_T, Y_T) directly and compare.
    const double H = 0.35, rho = 0.6, T = 1.5;
    const auto m = zero_model(H, rho, T);
    const fbm::TimeGrid g(T, 30);
    const auto p = modal_path(m, g, 0.8, -0.4);
    const auto blocks = cov_blocks(m, g);
    for (int i : {5, 15, 25}) {
        GaussianConditioner c;
        c.mean = Eigen::Vector4d::Zero();
        c.cov.resize(4, 4);
        const auto& tT = blocks.sigma_tT[static_cast<std::size_t>(i)];
        const double t = g.node(i);
        Eigen::Matrix2d tt;
        tt << t, rho * m.hurst.kappa() * std::pow(t, H + 0.5), rho * m.hurst.kappa() * std::pow(t, H + 0.5), std::pow(t, 2 * H);
        c.cov.topLeftCorner(2, 2) = tt;
        c.cov.topRightCorner(2, 2) = tT;
        c.cov.bottomLeftCorner(2, 2) = tT.transpose();
        c.cov.bottomRightCorner(2, 2) = blocks.sigma_T;
        c.observed_indices = {2, 3};
        c.observed_values = Eigen::Vector2d(0.8, -0.4);
        const auto r = condition_gaussian(c);
        CHECK(p.x_path[static_cast<std::size_t>(i)] == doctest::Approx(r.mean(0)).epsilon(1e-10));
        CHECK(p.y_path[static_cast<std::size_t>(i)] == doctest::Approx(r.mean(1)).epsilon(1e-10));
    }
}

TEST_CASE("modal path shapes") {
    const fbm::TimeGrid g(1.0, 1000);
    const auto line = modal_path(zero_model(0.5, 0.3), g, 1.0, 1.0);
    for (std::size_t i = 0; i < line.x_path.size(); ++i) {
        CHECK(line.x_path[i] == doctest::Approx(g.node(static_cast<int>(i))).epsilon(1e-12));
        CHECK(line.y_path[i] == doctest::Approx(g.node(static_cast<int>(i))).epsilon(1e-12));
    }
    const auto jump = modal_path(zero_model(0.01, 0.0), g, 1.0, 1.0);
    CHECK(jump.y_path[50] > 0.45);
    CHECK(jump.y_path[50] < 0.55);
    for (double rho : {0.0, 0.7, -0.7, -0.9})
        for (double H : {0.01, 0.25, 0.49, 0.75}) {
            const auto p = modal_path(zero_model(H, rho), g, 1.0, 1.0);
            CHECK(std::abs(p.x_path.back() - 1.0) < 1e-10);
            CHECK(std::abs(p.y_path.back() - 1.0) < 1e-10);
        }
    CHECK_THROWS_AS(modal_path(zero_model(0.3, 0.0), g, std::nan(""), 1.0), DomainError);
}
