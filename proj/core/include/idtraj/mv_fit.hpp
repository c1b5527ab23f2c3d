#pragma once

#include <vector>

#include <Eigen/Dense>

namespace idtraj {

enum class MvFamily { normal, student_t };

std::vector<double> default_mv_nu_grid();

// Zero-mean multivariate fit of per-step difference vectors (one row per
// day). The Student-t scatter is estimated by EM at each grid value of nu
// and the profile likelihood picks the winner; cov = scatter * nu/(nu-2).
struct MvFit {
    MvFamily family = MvFamily::normal;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd scatter;        // sampling shape: normal -> cov, t -> cov*(nu-2)/nu
    Eigen::MatrixXd scatter_chol;   // lower Cholesky factor of scatter
    double nu = 0.0;                // 0 for the normal family
    double loglik = 0.0;
    bool shrunk = false;
    double shrink_weight = 0.0;
};

MvFit fit_mv(const Eigen::MatrixXd& diffs, MvFamily family,
             const std::vector<double>& nu_grid = default_mv_nu_grid());

}  // namespace idtraj
