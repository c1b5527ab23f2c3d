#pragma once

// Independent reference implementations used only by tests. Each solves the
// same problem as a production routine by a different method so the two can
// cross-check each other.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace idtraj::testing {

// Unpenalized logistic regression by full Newton-Raphson with step halving.
// No standardization, no penalty path, no majorization.
Eigen::VectorXd irls_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              int max_iter = 200, double tol = 1e-12);

double mean_pinball(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta, double tau);

// Exact quantile regression loss by basic-solution enumeration: an optimal
// linear quantile fit interpolates p observations, so trying every p-subset
// and keeping the smallest pinball loss finds the global optimum on small
// instances.
double vertex_quantile_pinball(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau);

// One-sample Kolmogorov-Smirnov against U(0,1); `values` need not be sorted.
double ks_statistic_uniform(std::vector<double> values);
// Asymptotic two-sided p-value with the Stephens small-sample correction.
double kolmogorov_pvalue(double statistic, std::size_t n);

double normal_density(double z);
double normal_cdf_erfc(double z);

// Closed-form CRPS of a normal forecast (full integral).
double crps_normal(double obs, double mean, double sd);

// Mean pinball loss of the exact normal quantiles over a tau grid; the
// population value the quantile-grid CRPS estimator converges to.
double normal_grid_crps(double obs, double mean, double sd, const std::vector<double>& taus);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& v);

}  // namespace idtraj::testing
