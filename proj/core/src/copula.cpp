#include "idtraj/copula.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "idtraj/errors.hpp"
#include "idtraj/tdist.hpp"

namespace idtraj {

std::string copula_name(CopulaKind kind) {
    switch (kind) {
        case CopulaKind::independence: return "independence";
        case CopulaKind::gaussian: return "gaussian";
        case CopulaKind::comonotone: return "comonotone";
        case CopulaKind::countermonotone: return "countermonotone";
    }
    throw ContractError("unknown copula kind");
}

CopulaKind copula_from_name(const std::string& name) {
    if (name == "independence") return CopulaKind::independence;
    if (name == "gaussian") return CopulaKind::gaussian;
    if (name == "comonotone") return CopulaKind::comonotone;
    if (name == "countermonotone") return CopulaKind::countermonotone;
    throw ConfigError("unknown copula '" + name + "'");
}

Eigen::MatrixXd correlation_cholesky(const Eigen::MatrixXd& corr, bool* repaired) {
    if (corr.rows() != corr.cols()) throw ContractError("correlation matrix must be square");
    if (repaired) *repaired = false;
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() == Eigen::Success) return llt.matrixL();

    // Clip the spectrum and renormalize the diagonal back to unit variance.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(1e-10);
    Eigen::MatrixXd fixed = eig.eigenvectors() * vals.asDiagonal() *
                            eig.eigenvectors().transpose();
    Eigen::VectorXd d = fixed.diagonal().cwiseSqrt().cwiseInverse();
    fixed = d.asDiagonal() * fixed * d.asDiagonal();
    if (repaired) *repaired = true;
    Eigen::LLT<Eigen::MatrixXd> llt2(fixed);
    if (llt2.info() != Eigen::Success) {
        // Final fallback: blend toward the identity until factorization holds.
        double w = 1e-8;
        while (w <= 1.0) {
            Eigen::MatrixXd blend = (1.0 - w) * fixed +
                                    w * Eigen::MatrixXd::Identity(corr.rows(), corr.cols());
            Eigen::LLT<Eigen::MatrixXd> llt3(blend);
            if (llt3.info() == Eigen::Success) return llt3.matrixL();
            w *= 10.0;
        }
        throw EstimationError("correlation matrix could not be repaired");
    }
    return llt2.matrixL();
}

Eigen::MatrixXd copula_transform(const Eigen::MatrixXd& uniforms, const CopulaSpec& spec) {
    const Eigen::Index m = uniforms.rows();
    const Eigen::Index t = uniforms.cols();
    switch (spec.kind) {
        case CopulaKind::independence:
            return uniforms;
        case CopulaKind::comonotone: {
            Eigen::MatrixXd out(m, t);
            for (Eigen::Index j = 0; j < t; ++j) out.col(j) = uniforms.col(0);
            return out;
        }
        case CopulaKind::countermonotone: {
            Eigen::MatrixXd out(m, t);
            for (Eigen::Index j = 0; j < t; ++j) {
                if (j % 2 == 0) {
                    out.col(j) = uniforms.col(0);
                } else {
                    out.col(j) = (1.0 - uniforms.col(0).array()).matrix();
                }
            }
            return out;
        }
        case CopulaKind::gaussian: {
            if (spec.correlation.rows() != t) {
                throw ContractError("gaussian copula dimension mismatch");
            }
            const Eigen::MatrixXd chol = correlation_cholesky(spec.correlation);
            Eigen::MatrixXd z(m, t);
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = 0; j < t; ++j) {
                    z(i, j) = normal_quantile(uniforms(i, j));
                }
            }
            Eigen::MatrixXd corr_z = z * chol.transpose();
            Eigen::MatrixXd out(m, t);
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = 0; j < t; ++j) {
                    out(i, j) = normal_cdf(corr_z(i, j));
                }
            }
            return out;
        }
    }
    throw ContractError("unknown copula kind");
}

Eigen::MatrixXd reorder_to_copula(const Eigen::MatrixXd& ensemble, const CopulaSpec& spec,
                                  Rng& rng) {
    const Eigen::Index m = ensemble.rows();
    const Eigen::Index t = ensemble.cols();
    Eigen::MatrixXd base(m, t);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < t; ++j) base(i, j) = rng.uniform();
    }
    const Eigen::MatrixXd tmpl = copula_transform(base, spec);

    // Schaake-shuffle style: in each column, the member ranked r-th in the
    // template receives the r-th smallest ensemble value. Column multisets
    // are therefore preserved bit for bit.
    Eigen::MatrixXd out(m, t);
    std::vector<int> order(static_cast<std::size_t>(m));
    std::vector<double> sorted_vals(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < t; ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return tmpl(a, j) < tmpl(b, j);
        });
        for (Eigen::Index i = 0; i < m; ++i) sorted_vals[static_cast<std::size_t>(i)] = ensemble(i, j);
        std::sort(sorted_vals.begin(), sorted_vals.end());
        for (Eigen::Index r = 0; r < m; ++r) {
            out(order[static_cast<std::size_t>(r)], j) = sorted_vals[static_cast<std::size_t>(r)];
        }
    }
    return out;
}

}  // namespace idtraj
