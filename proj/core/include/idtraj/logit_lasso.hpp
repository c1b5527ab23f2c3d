#pragma once

#include <vector>

#include <Eigen/Dense>

#include "idtraj/designmatrix.hpp"

namespace idtraj {

struct LogitLassoOptions {
    int n_lambda = 100;
    double lambda_min_ratio = 1e-4;
    std::vector<double> extra_lambdas;  // appended after the grid, e.g. {0.0}
    double coord_tol = 1e-10;           // inner coordinate-move tolerance
    double outer_tol = 1e-8;            // reweighting fixed-point tolerance
    int max_outer = 50;
    long max_total_sweeps = 200000;
};

// L1-penalized logistic regression along an exponential penalty path, fitted
// by cyclic coordinate descent on a quadratic majorization with working
// weights and warm starts. The first feature column must be the intercept;
// it is neither standardized nor penalized. Remaining columns are
// standardized internally and coefficients are kept on that scale.
struct LogitLassoFit {
    Standardization standardization;
    Eigen::MatrixXd beta_path;        // p x n_path
    std::vector<double> lambda_path;  // descending, extras appended
    std::vector<double> bic_path;
    int selected = 0;                 // penalty index minimizing BIC
    Eigen::VectorXd beta;             // beta_path column `selected`
    Eigen::Index n_obs = 0;
    int outer_iterations = 0;

    double lambda() const { return lambda_path[static_cast<std::size_t>(selected)]; }
};

LogitLassoFit fit_logit_lasso(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y,
                              const LogitLassoOptions& options = {});

// Activity probability for a raw (unstandardized) feature row; the linear
// predictor is clamped to |eta| <= 30.
double predict_pi(const LogitLassoFit& fit, const Eigen::VectorXd& raw_row);

// Largest violation of the L1 stationarity conditions at (beta, lambda) for
// the standardized design; exposed so tests can pin it.
double logit_lasso_kkt_gap(const Eigen::MatrixXd& x_std, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& beta, double lambda);

}  // namespace idtraj
