#pragma once

#include <vector>

#include <Eigen/Dense>

#include "idtraj/monotone.hpp"

namespace idtraj {

struct LqrOptions {
    std::vector<double> taus;      // default 0.01, 0.02, ..., 0.99
    double smooth_width = 1e-4;    // residual floor of the smoothed check
    int n_stages = 3;              // floor shrinks x0.1 per stage
    double stage_shrink = 0.1;
    int max_iter_per_stage = 60;
    double coef_tol = 1e-9;
    double ridge = 1e-8;           // jitter applied on rank deficiency
};

std::vector<double> default_tau_grid();

// One linear quantile regression by iteratively reweighted least squares on
// a smoothed check loss.
Eigen::VectorXd fit_quantile_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        double tau, const LqrOptions& options = {},
                                        const Eigen::VectorXd* warm_start = nullptr,
                                        bool* ridge_used = nullptr);

// Per-horizon quantile curves from one shared forecast-origin design. Also
// records each horizon's in-sample target range as the distribution support.
struct LqrFit {
    std::vector<double> taus;
    std::vector<std::vector<Eigen::VectorXd>> coef;  // [horizon][tau]
    Eigen::VectorXd target_min;                      // per horizon
    Eigen::VectorXd target_max;
    bool ridge_used = false;
};

LqrFit fit_lqr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets,
               const LqrOptions& options = {});

// Continuous marginal distribution for one horizon at a given feature row:
// predicted quantiles are sorted (monotone rearrangement), pinned to the
// in-sample support at probability 0 and 1, separated by at least 1e-9, and
// interpolated monotonically.
MonotoneCdf build_marginal_cdf(const LqrFit& fit, const Eigen::VectorXd& row, int horizon);

}  // namespace idtraj
