#include "idtraj/tgamlss.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "idtraj/errors.hpp"
#include "idtraj/links.hpp"
#include "idtraj/tdist.hpp"

namespace idtraj {

namespace {

constexpr double kEtaSigmaMin = -15.0;  // sigma >= ~3e-7
constexpr double kEtaSigmaMax = 1e4;

struct WorkState {
    Eigen::VectorXd mu;
    Eigen::VectorXd eta_sigma;
    Eigen::VectorXd sigma;
    double nu = 10.0;
};

double loglik(const Eigen::VectorXd& y, const WorkState& st) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        ll += t3_logpdf(y[i], st.mu[i], st.sigma[i], st.nu);
    }
    return ll;
}

}  // namespace

double TGamlssFit::predict_mu(const Eigen::VectorXd& mu_features) const {
    if (variant == GamlssVariant::const_sigma || variant == GamlssVariant::sigma_only) {
        return 0.0;
    }
    return mu_features.dot(mu_beta);
}

double TGamlssFit::predict_sigma(const Eigen::VectorXd& sigma_features, double prev_price,
                                 double step) const {
    double eta;
    if (sigma_linear_active) {
        eta = sigma_features.dot(sigma_beta) + h_price.value(prev_price) +
              h_step.value(step);
    } else {
        eta = sigma_beta[0];
    }
    eta = std::clamp(eta, kEtaSigmaMin, kEtaSigmaMax);
    return std::clamp(link_sigma_inverse(eta), 1e-8, 1e6);
}

double TGamlssFit::constant_sigma() const {
    return std::clamp(link_sigma_inverse(sigma_beta[0]), 1e-8, 1e6);
}

TGamlssFit fit_t_gamlss(const GamlssData& data, GamlssVariant variant,
                        const GamlssOptions& options) {
    const Eigen::Index n = data.y.size();
    if (n < options.min_obs) {
        throw EstimationError("innovation fit needs at least " +
                              std::to_string(options.min_obs) + " observations, got " +
                              std::to_string(n));
    }
    const bool has_mu =
        variant == GamlssVariant::mu_only || variant == GamlssVariant::mu_and_sigma;
    const bool has_sigma_model =
        variant == GamlssVariant::sigma_only || variant == GamlssVariant::mu_and_sigma;
    if (has_mu && data.mu_x.rows() != n) throw ContractError("mu feature rows mismatch");
    if (has_sigma_model &&
        (data.sigma_x.rows() != n || data.prev_price.size() != n || data.step.size() != n)) {
        throw ContractError("sigma feature rows mismatch");
    }

    const double ybar = data.y.mean();
    const double yvar = (data.y.array() - ybar).square().sum() / static_cast<double>(n - 1);
    if (!(yvar > 0.0)) throw EstimationError("responses have zero variance");

    TGamlssFit fit;
    fit.variant = variant;
    fit.mu_beta = Eigen::VectorXd::Zero(3);
    fit.sigma_beta = Eigen::VectorXd::Zero(17);
    fit.sigma_linear_active = has_sigma_model;

    // Scale design: linear block plus centered smooth bases.
    Eigen::MatrixXd c_design;       // n x pc
    Eigen::MatrixXd penalty_price;  // basis-sized
    Eigen::MatrixXd penalty_step;
    Eigen::Index pc = 1;
    Eigen::Index off_price = -1, off_step = -1;
    Eigen::Index nb = options.n_sigma_basis;
    if (has_sigma_model) {
        const double plo = data.prev_price.minCoeff();
        const double phi = data.prev_price.maxCoeff();
        const double slo = data.step.minCoeff();
        const double shi = data.step.maxCoeff();
        fit.h_price.enabled = phi - plo > 1e-8;
        fit.h_step.enabled = shi - slo > 1e-8;
        pc = data.sigma_x.cols() + (fit.h_price.enabled ? nb : 0) +
             (fit.h_step.enabled ? nb : 0);
        c_design.resize(n, pc);
        c_design.leftCols(data.sigma_x.cols()) = data.sigma_x;
        Eigen::Index off = data.sigma_x.cols();
        if (fit.h_price.enabled) {
            fit.h_price.basis = BSplineBasis(plo, phi, static_cast<int>(nb),
                                             options.spline_degree);
            Eigen::MatrixXd b = fit.h_price.basis.rows(data.prev_price);
            fit.h_price.center = b.colwise().mean();
            b.rowwise() -= fit.h_price.center.transpose();
            c_design.middleCols(off, nb) = b;
            off_price = off;
            off += nb;
            penalty_price = pspline_penalty(static_cast<int>(nb), options.penalty_order);
        }
        if (fit.h_step.enabled) {
            fit.h_step.basis = BSplineBasis(slo, shi, static_cast<int>(nb),
                                            options.spline_degree);
            Eigen::MatrixXd b = fit.h_step.basis.rows(data.step);
            fit.h_step.center = b.colwise().mean();
            b.rowwise() -= fit.h_step.center.transpose();
            c_design.middleCols(off, nb) = b;
            off_step = off;
            penalty_step = pspline_penalty(static_cast<int>(nb), options.penalty_order);
        }
    } else {
        c_design = Eigen::MatrixXd::Ones(n, 1);
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(pc);

    WorkState st;
    st.mu = Eigen::VectorXd::Zero(n);
    const double eta0 = link_sigma(std::sqrt(yvar));
    theta[0] = eta0;
    st.eta_sigma = Eigen::VectorXd::Constant(n, eta0);
    if (has_sigma_model) st.eta_sigma = c_design * theta;
    st.sigma.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        st.sigma[i] = std::clamp(link_sigma_inverse(st.eta_sigma[i]), 1e-8, 1e6);
    }
    const bool nu_fixed = options.fix_nu > 0.0;
    st.nu = nu_fixed ? options.fix_nu : 10.0;

    double lambda_price = 10.0, lambda_step = 10.0;
    bool gcv_done = false;

    auto penalty_value = [&](const Eigen::VectorXd& th) {
        double pen = 0.0;
        if (off_price >= 0) {
            const auto a = th.segment(off_price, nb);
            pen += lambda_price * a.dot(penalty_price * a);
        }
        if (off_step >= 0) {
            const auto a = th.segment(off_step, nb);
            pen += lambda_step * a.dot(penalty_step * a);
        }
        return pen;
    };
    auto penalized_ll = [&]() { return loglik(data.y, st) - 0.5 * penalty_value(theta); };

    auto set_sigma_from_theta = [&]() {
        st.eta_sigma = has_sigma_model ? (c_design * theta).eval()
                                       : Eigen::VectorXd::Constant(n, theta[0]);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double eta = std::clamp(st.eta_sigma[i], kEtaSigmaMin, kEtaSigmaMax);
            st.sigma[i] = std::clamp(link_sigma_inverse(eta), 1e-8, 1e6);
        }
    };

    double ll_pen = penalized_ll();
    fit.penalized_deviance = -2.0 * ll_pen;
    Eigen::MatrixXd last_mu_system;
    Eigen::MatrixXd last_sigma_system;

    for (int outer = 0; outer < options.max_outer; ++outer) {
        const double ll_before_round = ll_pen;

        if (has_mu) {
            // Location block: Fisher scoring as weighted least squares.
            Eigen::VectorXd w(n), zwork(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double s = st.sigma[i] * std::sqrt((st.nu - 2.0) / st.nu);
                const double z = (data.y[i] - st.mu[i]) / s;
                const double wi = (st.nu + 1.0) / ((st.nu + 3.0) * s * s);
                const double ui = (st.nu + 1.0) * z / (s * (st.nu + z * z));
                w[i] = wi;
                zwork[i] = st.mu[i] + ui / wi;
            }
            const Eigen::MatrixXd xtwx = data.mu_x.transpose() * w.asDiagonal() * data.mu_x;
            const Eigen::VectorXd xtwz = data.mu_x.transpose() * w.cwiseProduct(zwork);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(xtwx);
            if (ldlt.info() != Eigen::Success) {
                throw EstimationError("singular location system");
            }
            const Eigen::VectorXd prev = fit.mu_beta;
            Eigen::VectorXd cand = ldlt.solve(xtwz);
            fit.mu_beta = cand;
            st.mu = data.mu_x * fit.mu_beta;
            double ll_new = penalized_ll();
            for (int h = 0; ll_new < ll_pen - 1e-10 * (1.0 + std::abs(ll_pen)) && h < 30; ++h) {
                cand = 0.5 * (cand + prev);
                fit.mu_beta = cand;
                st.mu = data.mu_x * fit.mu_beta;
                ll_new = penalized_ll();
            }
            ll_pen = ll_new;
            last_mu_system = xtwx;
        }

        {
            // Scale block on the link scale.
            Eigen::VectorXd w(n), zwork(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double sg = st.sigma[i];
                const double s = sg * std::sqrt((st.nu - 2.0) / st.nu);
                const double z = (data.y[i] - st.mu[i]) / s;
                const double dinv = link_sigma_dinv(sg);
                const double dldsigma =
                    st.nu * (z * z - 1.0) / (sg * (st.nu + z * z));
                const double wi =
                    std::max(2.0 * st.nu / ((st.nu + 3.0) * sg * sg) * dinv * dinv, 1e-10);
                w[i] = wi;
                zwork[i] = st.eta_sigma[i] + (dldsigma * dinv) / wi;
            }
            Eigen::MatrixXd ctwc = c_design.transpose() * w.asDiagonal() * c_design;
            Eigen::VectorXd ctwz = c_design.transpose() * w.cwiseProduct(zwork);
            const double ridge = 1e-10 * (ctwc.trace() / static_cast<double>(pc) + 1.0);

            auto assemble = [&](double lp, double ls) {
                Eigen::MatrixXd a = ctwc;
                a.diagonal().array() += ridge;
                if (off_price >= 0) {
                    a.block(off_price, off_price, nb, nb) += lp * penalty_price;
                }
                if (off_step >= 0) {
                    a.block(off_step, off_step, nb, nb) += ls * penalty_step;
                }
                return a;
            };

            if (!gcv_done && (off_price >= 0 || off_step >= 0)) {
                // Generalized cross-validation on the first working model;
                // the chosen weights stay fixed for the rest of the fit.
                auto gcv_score = [&](double lp, double ls) {
                    const Eigen::MatrixXd a = assemble(lp, ls);
                    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
                    const Eigen::VectorXd th = ldlt.solve(ctwz);
                    const Eigen::VectorXd resid = zwork - c_design * th;
                    const double rss = resid.dot(w.cwiseProduct(resid));
                    const double edf = ldlt.solve(ctwc).trace();
                    const double denom = std::max(static_cast<double>(n) - edf, 1.0);
                    return static_cast<double>(n) * rss / (denom * denom);
                };
                for (int pass = 0; pass < 2; ++pass) {
                    if (off_price >= 0) {
                        double best = gcv_score(lambda_price, lambda_step);
                        for (int g = 0; g < options.gcv_points; ++g) {
                            const double lg =
                                options.gcv_log10_min +
                                (options.gcv_log10_max - options.gcv_log10_min) * g /
                                    (options.gcv_points - 1);
                            const double cand_lambda = std::pow(10.0, lg);
                            const double score = gcv_score(cand_lambda, lambda_step);
                            if (score < best) {
                                best = score;
                                lambda_price = cand_lambda;
                            }
                        }
                    }
                    if (off_step >= 0) {
                        double best = gcv_score(lambda_price, lambda_step);
                        for (int g = 0; g < options.gcv_points; ++g) {
                            const double lg =
                                options.gcv_log10_min +
                                (options.gcv_log10_max - options.gcv_log10_min) * g /
                                    (options.gcv_points - 1);
                            const double cand_lambda = std::pow(10.0, lg);
                            const double score = gcv_score(lambda_price, cand_lambda);
                            if (score < best) {
                                best = score;
                                lambda_step = cand_lambda;
                            }
                        }
                    }
                }
                gcv_done = true;
            }

            const Eigen::MatrixXd a = assemble(lambda_price, lambda_step);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
            if (ldlt.info() != Eigen::Success) {
                throw EstimationError("singular scale system");
            }
            const Eigen::VectorXd prev = theta;
            Eigen::VectorXd cand = ldlt.solve(ctwz);
            theta = cand;
            set_sigma_from_theta();
            double ll_new = penalized_ll();
            for (int h = 0; ll_new < ll_pen - 1e-10 * (1.0 + std::abs(ll_pen)) && h < 30; ++h) {
                cand = 0.5 * (cand + prev);
                theta = cand;
                set_sigma_from_theta();
                ll_new = penalized_ll();
            }
            ll_pen = ll_new;
            // Effective dimensions of the smooths, for diagnostics.
            if (off_price >= 0 || off_step >= 0) {
                const Eigen::MatrixXd h = ldlt.solve(ctwc);
                if (off_price >= 0) {
                    fit.h_price.edf = h.block(off_price, off_price, nb, nb).trace();
                }
                if (off_step >= 0) {
                    fit.h_step.edf = h.block(off_step, off_step, nb, nb).trace();
                }
            }
            last_sigma_system = a;
        }

        if (!nu_fixed) {
            // Tail block: golden-section on the link scale. The scale stays
            // an exact standard deviation while nu moves.
            const double lo = link_nu(options.nu_min);
            const double hi = link_nu(options.nu_max);
            auto objective = [&](double eta) {
                WorkState trial = st;
                trial.nu = link_nu_inverse(eta);
                return loglik(data.y, trial);
            };
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = lo, b = hi;
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = objective(x1), f2 = objective(x2);
            for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
                if (f1 < f2) {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + gr * (b - a);
                    f2 = objective(x2);
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - gr * (b - a);
                    f1 = objective(x1);
                }
            }
            const double eta_opt = 0.5 * (a + b);
            const double nu_new = link_nu_inverse(eta_opt);
            const double prev_nu = st.nu;
            st.nu = nu_new;
            double ll_new = penalized_ll();
            if (ll_new < ll_pen - 1e-10 * (1.0 + std::abs(ll_pen))) {
                st.nu = prev_nu;  // keep the better point
                ll_new = penalized_ll();
            }
            ll_pen = ll_new;
            fit.nu_at_bound = eta_opt - lo < 1e-6 || hi - eta_opt < 1e-6;
        }

        ++fit.iterations;
        // Every block either improves the penalized likelihood or is rolled
        // back, so the sequence is non-decreasing.
        assert(ll_pen >= ll_before_round - 1e-8 * (1.0 + std::abs(ll_before_round)));
        const double dev_new = -2.0 * ll_pen;
        if (std::abs(fit.penalized_deviance - dev_new) < options.deviance_tol) {
            fit.penalized_deviance = dev_new;
            fit.converged = true;
            break;
        }
        fit.penalized_deviance = dev_new;
    }

    fit.nu = st.nu;
    if (has_sigma_model) {
        fit.sigma_beta = theta.head(17);
        if (off_price >= 0) fit.h_price.coef = theta.segment(off_price, nb);
        if (off_step >= 0) fit.h_step.coef = theta.segment(off_step, nb);
    } else {
        fit.sigma_beta[0] = theta[0];
    }

    // Observed-information style standard errors, diagnostics only.
    if (has_mu && last_mu_system.size() > 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(last_mu_system);
        const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(3, 3));
        fit.mu_se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
    if (last_sigma_system.size() > 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(last_sigma_system);
        const Eigen::MatrixXd cov =
            ldlt.solve(Eigen::MatrixXd::Identity(pc, pc));
        const Eigen::Index k = has_sigma_model ? 17 : 1;
        fit.sigma_se = cov.diagonal().head(k).cwiseMax(0.0).cwiseSqrt();
    }
    return fit;
}

}  // namespace idtraj
