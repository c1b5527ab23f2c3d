#include "idtraj/quantile_reg.hpp"

#include <algorithm>
#include <cmath>

#include "idtraj/errors.hpp"

namespace idtraj {

std::vector<double> default_tau_grid() {
    std::vector<double> taus(99);
    for (int i = 0; i < 99; ++i) taus[i] = (i + 1) / 100.0;
    return taus;
}

namespace {

Eigen::VectorXd solve_weighted(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w, double ridge, bool* ridge_used) {
    const Eigen::MatrixXd xtwx = x.transpose() * w.asDiagonal() * x;
    const Eigen::VectorXd xtwy = x.transpose() * (w.cwiseProduct(y));
    Eigen::VectorXd beta = xtwx.ldlt().solve(xtwy);
    if (!beta.allFinite()) {
        Eigen::MatrixXd jittered = xtwx;
        jittered.diagonal().array() += ridge * (1.0 + xtwx.trace() / xtwx.rows());
        beta = jittered.ldlt().solve(xtwy);
        if (ridge_used != nullptr) *ridge_used = true;
        if (!beta.allFinite()) throw EstimationError("quantile regression: singular weighted system");
    }
    return beta;
}

}  // namespace

Eigen::VectorXd fit_quantile_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        double tau, const LqrOptions& options,
                                        const Eigen::VectorXd* warm_start, bool* ridge_used) {
    if (x.rows() != y.size()) throw ContractError("quantile regression: row mismatch");
    if (x.rows() < x.cols()) throw EstimationError("quantile regression: fewer rows than features");
    if (!(tau > 0.0 && tau < 1.0)) throw ContractError("quantile regression: tau outside (0,1)");

    Eigen::VectorXd beta;
    if (warm_start != nullptr && warm_start->size() == x.cols()) {
        beta = *warm_start;
    } else {
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(x.rows());
        beta = solve_weighted(x, y, ones, options.ridge, ridge_used);
    }

    double h = options.smooth_width;
    for (int stage = 0; stage < options.n_stages; ++stage) {
        for (int iter = 0; iter < options.max_iter_per_stage; ++iter) {
            const Eigen::VectorXd r = y - x * beta;
            Eigen::VectorXd w(r.size());
            for (Eigen::Index i = 0; i < r.size(); ++i) {
                const double grad_weight = r[i] < 0.0 ? 1.0 - tau : tau;
                w[i] = grad_weight / std::max(std::abs(r[i]), h);
            }
            const Eigen::VectorXd next = solve_weighted(x, y, w, options.ridge, ridge_used);
            const double move = (next - beta).cwiseAbs().maxCoeff();
            beta = next;
            if (move < options.coef_tol) break;
        }
        h *= options.stage_shrink;
    }
    return beta;
}

LqrFit fit_lqr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets,
               const LqrOptions& options) {
    if (x.rows() != targets.rows()) throw ContractError("quantile regression: row mismatch");
    if (x.rows() == 0) throw EstimationError("quantile regression: empty sample");

    LqrFit fit;
    fit.taus = options.taus.empty() ? default_tau_grid() : options.taus;
    const int horizons = static_cast<int>(targets.cols());
    fit.coef.resize(horizons);
    fit.target_min = targets.colwise().minCoeff();
    fit.target_max = targets.colwise().maxCoeff();

    for (int t = 0; t < horizons; ++t) {
        fit.coef[t].reserve(fit.taus.size());
        const Eigen::VectorXd y = targets.col(t);
        const Eigen::VectorXd* warm = nullptr;
        for (std::size_t k = 0; k < fit.taus.size(); ++k) {
            Eigen::VectorXd beta =
                fit_quantile_regression(x, y, fit.taus[k], options, warm, &fit.ridge_used);
            fit.coef[t].push_back(std::move(beta));
            warm = &fit.coef[t].back();
        }
    }
    return fit;
}

MonotoneCdf build_marginal_cdf(const LqrFit& fit, const Eigen::VectorXd& row, int horizon) {
    if (horizon < 0 || horizon >= static_cast<int>(fit.coef.size()))
        throw ContractError("marginal cdf: horizon out of range");
    const auto& coefs = fit.coef[horizon];
    const int n_tau = static_cast<int>(coefs.size());

    std::vector<double> qs(n_tau);
    for (int k = 0; k < n_tau; ++k) {
        if (coefs[k].size() != row.size()) throw ContractError("marginal cdf: feature size mismatch");
        qs[k] = coefs[k].dot(row);
    }
    std::sort(qs.begin(), qs.end());

    const double lo = fit.target_min[horizon];
    const double hi = fit.target_max[horizon];
    constexpr double kSep = 1e-9;
    const int n_knots = n_tau + 2;
    if (!(hi - lo > n_knots * kSep))
        throw EstimationError("marginal cdf: degenerate in-sample support");

    std::vector<double> xs(n_knots), ys(n_knots);
    xs[0] = lo;
    ys[0] = 0.0;
    for (int k = 0; k < n_tau; ++k) {
        const double upper = hi - (n_tau - k) * kSep;
        xs[k + 1] = std::clamp(qs[k], xs[k] + kSep, upper);
        ys[k + 1] = fit.taus[k];
    }
    xs[n_knots - 1] = hi;
    ys[n_knots - 1] = 1.0;
    return MonotoneCdf(xs, ys);
}

}  // namespace idtraj
