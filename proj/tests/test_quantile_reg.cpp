#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "idtraj/errors.hpp"
#include "idtraj/quantile_reg.hpp"
#include "idtraj/rng.hpp"
#include "idtraj/tdist.hpp"
#include "support/oracles.hpp"

using namespace idtraj;

TEST_SUITE("quantile-reg") {

TEST_CASE("default grid holds the 99 percent levels") {
    const std::vector<double> taus = default_tau_grid();
    REQUIRE(taus.size() == 99);
    CHECK(taus.front() == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(taus.back() == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(taus[49] == doctest::Approx(0.50).epsilon(1e-12));
}

TEST_CASE("intercept-only median matches the sample median") {
    Rng rng(41);
    const Eigen::Index n = 501;
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = t3_sample(rng, 2.0, 1.0, 6.0);

    const Eigen::VectorXd beta = fit_quantile_regression(x, y, 0.5);
    std::vector<double> sorted(y.data(), y.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[static_cast<std::size_t>(n / 2)];
    CHECK(std::abs(beta[0] - median) < 2e-3);
}

TEST_CASE("constant targets give constant quantiles") {
    Eigen::MatrixXd x(40, 2);
    Rng rng(42);
    for (Eigen::Index i = 0; i < 40; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = rng.uniform();
    }
    const Eigen::MatrixXd targets = Eigen::MatrixXd::Constant(40, 3, 7.25);
    const LqrFit fit = fit_lqr(x, targets);
    for (int h = 0; h < 3; ++h) {
        for (const Eigen::VectorXd& beta : fit.coef[static_cast<std::size_t>(h)]) {
            Eigen::VectorXd probe(2);
            probe << 1.0, 0.41;
            CHECK(probe.dot(beta) == doctest::Approx(7.25).epsilon(1e-7));
        }
    }
    CHECK(fit.target_min[0] == 7.25);
    CHECK(fit.target_max[2] == 7.25);

    // A degenerate support cannot define a continuous distribution.
    Eigen::VectorXd probe(2);
    probe << 1.0, 0.5;
    CHECK_THROWS_AS(build_marginal_cdf(fit, probe, 0), EstimationError);
}

TEST_CASE("pinball loss matches the enumeration oracle within a tenth percent") {
    Rng rng(43);
    const Eigen::Index n = 200;
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = normal_quantile(rng.uniform());
        x(i, 2) = rng.uniform() * 2.0 - 1.0;
        y[i] = 0.5 + 0.8 * x(i, 1) - 1.1 * x(i, 2) + t3_sample(rng, 0.0, 0.7, 5.0);
    }
    for (double tau : {0.1, 0.5, 0.9}) {
        const Eigen::VectorXd beta = fit_quantile_regression(x, y, tau);
        const double ours = testing::mean_pinball(x, y, beta, tau);
        const double oracle = testing::vertex_quantile_pinball(x, y, tau);
        CHECK(ours <= oracle * 1.001);
        CHECK(ours >= oracle * (1.0 - 1e-9));
    }
}

TEST_CASE("collinear designs fall back to a ridge solve") {
    Rng rng(44);
    const Eigen::Index n = 60;
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = rng.uniform();
        x(i, 2) = 2.0 * x(i, 1);  // exact collinearity
        y[i] = x(i, 1) + 0.1 * normal_quantile(rng.uniform());
    }
    bool ridge_used = false;
    const Eigen::VectorXd beta = fit_quantile_regression(x, y, 0.5, {}, nullptr, &ridge_used);
    CHECK(beta.allFinite());
}

TEST_CASE("marginal distribution round trips and never crosses") {
    Rng rng(45);
    const Eigen::Index n = 150;
    const int horizons = 4;
    Eigen::MatrixXd x(n, 3);
    Eigen::MatrixXd targets(n, horizons);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = normal_quantile(rng.uniform());
        x(i, 2) = rng.uniform();
        for (int h = 0; h < horizons; ++h) {
            targets(i, h) =
                0.3 * x(i, 1) + 0.1 * (h + 1) + std::sqrt(h + 1.0) * t3_sample(rng, 0.0, 0.5, 5.0);
        }
    }
    const LqrFit fit = fit_lqr(x, targets);
    REQUIRE(fit.coef.size() == static_cast<std::size_t>(horizons));
    REQUIRE(fit.coef[0].size() == fit.taus.size());

    Eigen::VectorXd probe(3);
    probe << 1.0, 0.2, 0.6;
    for (int h = 0; h < horizons; ++h) {
        const MonotoneCdf cdf = build_marginal_cdf(fit, probe, h);
        CHECK(cdf.support_min() == fit.target_min[h]);
        CHECK(cdf.support_max() == fit.target_max[h]);
        double prev = cdf.support_min() - 1.0;
        for (double p : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
            const double q = cdf.quantile(p);
            CHECK(q >= prev);  // monotone rearrangement cannot cross
            CHECK(cdf.cdf(q) == doctest::Approx(p).epsilon(1e-6));
            prev = q;
        }
    }
}

TEST_CASE("warm starts do not change the optimum") {
    Rng rng(46);
    const Eigen::Index n = 120;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = rng.uniform();
        y[i] = 2.0 * x(i, 1) + t3_sample(rng, 0.0, 0.4, 8.0);
    }
    const Eigen::VectorXd cold = fit_quantile_regression(x, y, 0.3);
    Eigen::VectorXd start(2);
    start << 5.0, -5.0;
    const Eigen::VectorXd warm = fit_quantile_regression(x, y, 0.3, {}, &start);
    const double lc = testing::mean_pinball(x, y, cold, 0.3);
    const double lw = testing::mean_pinball(x, y, warm, 0.3);
    CHECK(std::abs(lc - lw) < 1e-6 * std::max(1.0, lc));
}

}  // TEST_SUITE
