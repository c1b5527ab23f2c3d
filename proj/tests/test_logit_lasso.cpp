#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "idtraj/logit_lasso.hpp"
#include "idtraj/rng.hpp"
#include "support/oracles.hpp"

using namespace idtraj;

namespace {

struct LogitSample {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

LogitSample simulate_logit(Eigen::Index n, Eigen::Index p, const Eigen::VectorXd& beta,
                           std::uint64_t seed) {
    Rng rng(seed);
    LogitSample s;
    s.x.resize(n, p);
    s.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s.x(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < p; ++j) {
            // Box-Muller keeps the oracle free of production samplers.
            const double u1 = rng.uniform();
            const double u2 = rng.uniform();
            s.x(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        const double eta = s.x.row(i).dot(beta);
        s.y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
    }
    return s;
}

}  // namespace

TEST_SUITE("logit-lasso") {

TEST_CASE("at the top of the path only the intercept survives") {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(6);
    beta << -0.4, 0.8, 0.0, -0.5, 0.0, 0.3;
    const LogitSample s = simulate_logit(800, 6, beta, 1);

    const LogitLassoFit fit = fit_logit_lasso(s.x, s.y);
    const Eigen::VectorXd top = fit.beta_path.col(0);
    for (Eigen::Index j = 1; j < top.size(); ++j) CHECK(top[j] == 0.0);
    const double ybar = s.y.mean();
    CHECK(top[0] == doctest::Approx(std::log(ybar / (1.0 - ybar))).epsilon(1e-6));
    CHECK(fit.lambda_path.front() > fit.lambda_path[1]);
}

TEST_CASE("zero penalty matches the Newton oracle per coefficient") {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(5);
    beta << 0.3, 1.2, -0.7, 0.0, 0.4;
    const LogitSample s = simulate_logit(3000, 5, beta, 2);

    LogitLassoOptions opt;
    opt.extra_lambdas = {0.0};
    const LogitLassoFit fit = fit_logit_lasso(s.x, s.y, opt);
    CHECK(fit.lambda_path.back() == 0.0);
    const Eigen::VectorXd ours = fit.beta_path.col(fit.beta_path.cols() - 1);

    const Eigen::MatrixXd x_std = fit.standardization.apply(s.x);
    const Eigen::VectorXd oracle = testing::irls_logistic(x_std, s.y);
    REQUIRE(ours.size() == oracle.size());
    for (Eigen::Index j = 0; j < ours.size(); ++j) {
        CHECK(std::abs(ours[j] - oracle[j]) < 1e-4);
    }
}

TEST_CASE("stationarity conditions hold at the selected penalty") {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(8);
    beta << 0.1, 0.9, -0.6, 0.0, 0.0, 0.5, 0.0, -0.3;
    const LogitSample s = simulate_logit(2000, 8, beta, 3);
    const LogitLassoFit fit = fit_logit_lasso(s.x, s.y);

    const Eigen::MatrixXd x_std = fit.standardization.apply(s.x);
    CHECK(logit_lasso_kkt_gap(x_std, s.y, fit.beta, fit.lambda()) < 1e-5);
    CHECK(fit.selected >= 0);
    CHECK(fit.n_obs == 2000);
}

TEST_CASE("information criterion recovers a sparse support") {
    const Eigen::Index p = 61;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta[0] = 0.2;
    beta[3] = 1.5;
    beta[10] = -1.0;
    beta[25] = 0.8;
    beta[40] = -0.6;
    beta[57] = 0.5;
    const LogitSample s = simulate_logit(20000, p, beta, 4);

    const LogitLassoFit fit = fit_logit_lasso(s.x, s.y);
    // Back to the raw feature scale.
    Eigen::VectorXd raw = Eigen::VectorXd::Zero(p);
    raw[0] = fit.beta[0];
    for (Eigen::Index j = 1; j < p; ++j) {
        if (fit.standardization.is_constant[static_cast<std::size_t>(j)]) continue;
        raw[j] = fit.beta[j] / fit.standardization.scale[j];
        raw[0] -= fit.beta[j] * fit.standardization.mean[j] / fit.standardization.scale[j];
    }

    for (Eigen::Index j = 1; j < p; ++j) {
        if (beta[j] != 0.0) {
            CHECK(raw[j] != 0.0);
            // The selected penalty shrinks magnitudes toward zero.
            CHECK(std::abs(raw[j] - beta[j]) < 0.2);
            CHECK(raw[j] * beta[j] > 0.0);
        } else {
            CHECK(raw[j] == 0.0);
        }
    }
    CHECK(std::abs(raw[0] - beta[0]) < 0.2);
}

TEST_CASE("intercept-only design predicts the base rate") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(500, 1);
    Eigen::VectorXd y(500);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = i % 4 == 0 ? 1.0 : 0.0;
    const LogitLassoFit fit = fit_logit_lasso(x, y);
    CHECK(predict_pi(fit, Eigen::VectorXd::Ones(1)) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("prediction clamps the linear predictor") {
    LogitLassoFit fit;
    fit.standardization.mean = Eigen::VectorXd::Zero(2);
    fit.standardization.scale = Eigen::VectorXd::Ones(2);
    fit.standardization.is_constant = {1, 1};
    fit.beta = Eigen::VectorXd::Zero(2);

    Eigen::VectorXd row(2);
    row << 1.0, 3.0;
    CHECK(predict_pi(fit, row) == 0.5);

    fit.beta[1] = 1000.0;
    const double hi = predict_pi(fit, row);
    CHECK(hi < 1.0);
    CHECK(hi > 0.999999);
    fit.beta[1] = -1000.0;
    const double lo = predict_pi(fit, row);
    CHECK(lo > 0.0);
    CHECK(lo < 1e-6);
}

TEST_CASE("rejects degenerate responses") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(300, 2);
    for (Eigen::Index i = 0; i < 300; ++i) x(i, 1) = static_cast<double>(i);
    CHECK_THROWS(fit_logit_lasso(x, Eigen::VectorXd::Zero(300)));
    CHECK_THROWS(fit_logit_lasso(x, Eigen::VectorXd::Ones(300)));
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(300);
    bad[0] = 0.5;
    CHECK_THROWS(fit_logit_lasso(x, bad));
}

}  // TEST_SUITE
