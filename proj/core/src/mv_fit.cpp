#include "idtraj/mv_fit.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "idtraj/errors.hpp"

namespace idtraj {

std::vector<double> default_mv_nu_grid() {
    return {2.1, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0};
}

namespace {

bool cholesky_ok(const Eigen::MatrixXd& m, Eigen::MatrixXd* chol) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::MatrixXd l = llt.matrixL();
    const double floor = 1e-9 * std::sqrt(m.trace() / m.rows());
    if ((l.diagonal().array() < floor).any()) return false;
    if (chol != nullptr) *chol = l;
    return true;
}

// Blends toward a floored diagonal target until the matrix factorizes.
Eigen::MatrixXd repair_spd(const Eigen::MatrixXd& m, bool* shrunk, double* weight) {
    const double scale = m.trace() / m.rows();
    Eigen::VectorXd diag_target = m.diagonal().cwiseMax(1e-10 * scale);
    if (cholesky_ok(m, nullptr)) return m;
    for (double delta : {1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.25, 0.5, 1.0}) {
        Eigen::MatrixXd blended = (1.0 - delta) * m;
        blended.diagonal() = (1.0 - delta) * m.diagonal() + delta * diag_target;
        if (cholesky_ok(blended, nullptr)) {
            *shrunk = true;
            *weight = std::max(*weight, delta);
            return blended;
        }
    }
    throw EstimationError("multivariate fit: covariance not repairable");
}

double normal_loglik(const Eigen::MatrixXd& x, const Eigen::MatrixXd& scatter) {
    const Eigen::LLT<Eigen::MatrixXd> llt(scatter);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double quad = 0.0;
    for (Eigen::Index d = 0; d < x.rows(); ++d) {
        const Eigen::VectorXd v = x.row(d).transpose();
        quad += v.dot(llt.solve(v));
    }
    const double n = static_cast<double>(x.rows());
    const double t = static_cast<double>(x.cols());
    return -0.5 * (n * t * std::log(2.0 * M_PI) + n * logdet + quad);
}

double t_loglik(const Eigen::MatrixXd& x, const Eigen::MatrixXd& scatter, double nu) {
    const double t = static_cast<double>(x.cols());
    const double n = static_cast<double>(x.rows());
    const Eigen::LLT<Eigen::MatrixXd> llt(scatter);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double tail = 0.0;
    for (Eigen::Index d = 0; d < x.rows(); ++d) {
        const Eigen::VectorXd v = x.row(d).transpose();
        tail += std::log1p(v.dot(llt.solve(v)) / nu);
    }
    const double c = boost::math::lgamma((nu + t) / 2.0) - boost::math::lgamma(nu / 2.0) -
                     0.5 * t * std::log(nu * M_PI);
    return n * c - 0.5 * n * logdet - 0.5 * (nu + t) * tail;
}

Eigen::MatrixXd em_scatter(const Eigen::MatrixXd& x, double nu, Eigen::MatrixXd start,
                           bool* shrunk, double* weight) {
    const double t = static_cast<double>(x.cols());
    Eigen::MatrixXd s = std::move(start);
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::LLT<Eigen::MatrixXd> llt(s);
        Eigen::VectorXd w(x.rows());
        for (Eigen::Index d = 0; d < x.rows(); ++d) {
            const Eigen::VectorXd v = x.row(d).transpose();
            w[d] = (nu + t) / (nu + v.dot(llt.solve(v)));
        }
        Eigen::MatrixXd next = x.transpose() * w.asDiagonal() * x / static_cast<double>(x.rows());
        next = repair_spd(next, shrunk, weight);
        const double move = (next - s).cwiseAbs().maxCoeff() / (1.0 + s.cwiseAbs().maxCoeff());
        s = std::move(next);
        if (move < 1e-10) break;
    }
    return s;
}

}  // namespace

MvFit fit_mv(const Eigen::MatrixXd& diffs, MvFamily family, const std::vector<double>& nu_grid) {
    if (diffs.rows() < 2) throw EstimationError("multivariate fit: needs at least two days");
    if (!diffs.allFinite()) throw DataError("multivariate fit: non-finite differences");

    const Eigen::MatrixXd second_moment =
        diffs.transpose() * diffs / static_cast<double>(diffs.rows());
    if (second_moment.trace() <= 0.0)
        throw EstimationError("multivariate fit: all differences are zero");

    MvFit fit;
    fit.family = family;
    const Eigen::MatrixXd base = repair_spd(second_moment, &fit.shrunk, &fit.shrink_weight);

    if (family == MvFamily::normal) {
        fit.scatter = base;
        fit.cov = base;
        fit.nu = 0.0;
        fit.loglik = normal_loglik(diffs, fit.scatter);
    } else {
        if (nu_grid.empty()) throw ContractError("multivariate fit: empty nu grid");
        double best_ll = -std::numeric_limits<double>::infinity();
        for (double nu : nu_grid) {
            if (!(nu > 2.0)) throw ContractError("multivariate fit: nu grid must stay above 2");
            const Eigen::MatrixXd s = em_scatter(diffs, nu, base, &fit.shrunk, &fit.shrink_weight);
            const double ll = t_loglik(diffs, s, nu);
            if (ll > best_ll) {
                best_ll = ll;
                fit.scatter = s;
                fit.nu = nu;
            }
        }
        fit.loglik = best_ll;
        fit.cov = fit.scatter * (fit.nu / (fit.nu - 2.0));
    }

    if (!cholesky_ok(fit.scatter, &fit.scatter_chol))
        throw EstimationError("multivariate fit: final scatter not positive definite");
    return fit;
}

}  // namespace idtraj
