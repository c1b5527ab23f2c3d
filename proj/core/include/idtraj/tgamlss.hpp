#pragma once

#include <Eigen/Dense>

#include "idtraj/splines.hpp"

namespace idtraj {

// Model variants for the zero-one inflated innovation component: which of
// the location and scale predictors are active. The tail parameter is always
// a fitted constant (unless pinned by fix_nu).
enum class GamlssVariant { const_sigma, mu_only, sigma_only, mu_and_sigma };

struct GamlssOptions {
    double deviance_tol = 1e-6;
    int max_outer = 200;
    int n_sigma_basis = 20;
    int spline_degree = 3;
    int penalty_order = 2;
    double nu_min = 2.05;
    double nu_max = 100.0;
    double fix_nu = 0.0;  // > 0 pins the tail parameter (1e6 ~ normal limit)
    int min_obs = 200;
    double gcv_log10_min = -2.0;
    double gcv_log10_max = 6.0;
    int gcv_points = 17;
};

struct GamlssData {
    Eigen::MatrixXd mu_x;        // n x 3 (may be empty for variants without mu)
    Eigen::MatrixXd sigma_x;     // n x 17 (may be empty for intercept-only scale)
    Eigen::VectorXd prev_price;  // smooth input (full scale variants)
    Eigen::VectorXd step;        // smooth input (full scale variants)
    Eigen::VectorXd y;           // responses
};

// One penalized smooth term of the scale predictor.
struct PSplineTerm {
    bool enabled = false;
    BSplineBasis basis;
    Eigen::VectorXd center;  // training column means (basis is centered)
    Eigen::VectorXd coef;
    double lambda = 0.0;
    double edf = 0.0;

    double value(double x) const {
        if (!enabled) return 0.0;
        return (basis.row(x) - center).dot(coef);
    }
};

struct TGamlssFit {
    GamlssVariant variant = GamlssVariant::const_sigma;
    Eigen::VectorXd mu_beta;     // 3 entries; zero when the variant drops mu
    Eigen::VectorXd sigma_beta;  // 17 entries; only [0] used when intercept-only
    bool sigma_linear_active = false;
    PSplineTerm h_price;
    PSplineTerm h_step;
    double nu = 10.0;
    double penalized_deviance = 0.0;
    int iterations = 0;
    bool converged = false;
    bool nu_at_bound = false;
    Eigen::VectorXd mu_se;     // observed-information scale, diagnostics only
    Eigen::VectorXd sigma_se;  // linear block only

    double predict_mu(const Eigen::VectorXd& mu_features) const;
    double predict_sigma(const Eigen::VectorXd& sigma_features, double prev_price,
                         double step) const;
    double constant_sigma() const;  // intercept-only variants
};

// Penalized maximum likelihood for the t innovation model by block
// coordinate ascent: location by weighted least squares, scale (linear plus
// smooths) by penalized weighted least squares on the link scale, tail by
// golden-section on its link scale. Smoothing weights are chosen once by
// generalized cross-validation on the first scale-block working model.
TGamlssFit fit_t_gamlss(const GamlssData& data, GamlssVariant variant,
                        const GamlssOptions& options = {});

}  // namespace idtraj
