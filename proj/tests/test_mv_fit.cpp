#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "idtraj/errors.hpp"
#include "idtraj/mv_fit.hpp"
#include "idtraj/rng.hpp"
#include "idtraj/tdist.hpp"

using namespace idtraj;

namespace {

Eigen::MatrixXd ar1_matrix(int t, double scale, double rho) {
    Eigen::MatrixXd m(t, t);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) m(i, j) = scale * std::pow(rho, std::abs(i - j));
    return m;
}

Eigen::MatrixXd sample_normal_rows(Rng& rng, const Eigen::MatrixXd& cov, int days) {
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
    Eigen::MatrixXd x(days, cov.rows());
    for (int d = 0; d < days; ++d) {
        Eigen::VectorXd u(cov.rows());
        for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = normal_quantile(rng.uniform());
        x.row(d) = (l * u).transpose();
    }
    return x;
}

Eigen::MatrixXd sample_t_rows(Rng& rng, const Eigen::MatrixXd& scatter, double nu, int days) {
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(scatter).matrixL();
    Eigen::MatrixXd x(days, scatter.rows());
    for (int d = 0; d < days; ++d) {
        Eigen::VectorXd u(scatter.rows());
        for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = normal_quantile(rng.uniform());
        const double w = chi_squared_quantile(rng.uniform(), nu);
        x.row(d) = (l * u * std::sqrt(nu / w)).transpose();
    }
    return x;
}

}  // namespace

TEST_SUITE("mv-fit") {

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(fit_mv(Eigen::MatrixXd::Zero(1, 4), MvFamily::normal), EstimationError);
    CHECK_THROWS_AS(fit_mv(Eigen::MatrixXd::Zero(50, 4), MvFamily::normal), EstimationError);

    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(10, 3);
    bad(4, 1) = std::nan("");
    CHECK_THROWS_AS(fit_mv(bad, MvFamily::normal), DataError);

    Eigen::MatrixXd ok = Eigen::MatrixXd::Random(20, 3);
    CHECK_THROWS_AS(fit_mv(ok, MvFamily::student_t, {}), ContractError);
    CHECK_THROWS_AS(fit_mv(ok, MvFamily::student_t, {1.5}), ContractError);
}

TEST_CASE("normal family recovers a known covariance") {
    Rng rng(51);
    const Eigen::MatrixXd truth = ar1_matrix(4, 2.0, 0.6);
    const Eigen::MatrixXd x = sample_normal_rows(rng, truth, 5000);

    const MvFit fit = fit_mv(x, MvFamily::normal);
    CHECK(fit.family == MvFamily::normal);
    CHECK(fit.nu == 0.0);
    CHECK(fit.cov == fit.scatter);
    CHECK((fit.cov - truth).norm() / truth.norm() < 0.05);
    CHECK(std::isfinite(fit.loglik));

    const Eigen::MatrixXd rebuilt = fit.scatter_chol * fit.scatter_chol.transpose();
    CHECK((rebuilt - fit.scatter).cwiseAbs().maxCoeff() < 1e-10 * fit.scatter.norm());
}

TEST_CASE("student-t family lands near the generating tail index") {
    const Eigen::MatrixXd scatter = ar1_matrix(5, 1.0, 0.5);
    Rng rng(52);
    int near = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        const Eigen::MatrixXd x = sample_t_rows(rng, scatter, 4.0, 600);
        const MvFit fit = fit_mv(x, MvFamily::student_t);
        CHECK(fit.nu > 2.0);
        CHECK((fit.cov - fit.scatter * (fit.nu / (fit.nu - 2.0))).cwiseAbs().maxCoeff() < 1e-12);
        if (fit.nu >= 3.0 && fit.nu <= 5.0) ++near;
    }
    CHECK(near >= 70);
}

TEST_CASE("student-t beats normal likelihood on heavy-tailed data") {
    Rng rng(53);
    const Eigen::MatrixXd scatter = ar1_matrix(4, 1.5, 0.4);
    const Eigen::MatrixXd x = sample_t_rows(rng, scatter, 4.0, 2000);
    const MvFit t_fit = fit_mv(x, MvFamily::student_t);
    const MvFit n_fit = fit_mv(x, MvFamily::normal);
    CHECK(t_fit.loglik > n_fit.loglik);
}

TEST_CASE("rank-deficient second moments are repaired by shrinkage") {
    Rng rng(54);
    Eigen::MatrixXd x(3, 6);  // fewer days than steps
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = normal_quantile(rng.uniform());

    const MvFit fit = fit_mv(x, MvFamily::normal);
    CHECK(fit.shrunk);
    CHECK(fit.shrink_weight > 0.0);
    const Eigen::LLT<Eigen::MatrixXd> llt(fit.scatter);
    CHECK(llt.info() == Eigen::Success);
}

}  // TEST_SUITE
