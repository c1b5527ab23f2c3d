#include "idtraj/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "idtraj/errors.hpp"
#include "idtraj/quantile_reg.hpp"

namespace idtraj {

double quantile_type7(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ContractError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("quantile level outside [0,1]");
    const auto n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = (static_cast<double>(n) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double pinball(double tau, double obs, double pred) {
    const double r = obs - pred;
    return r >= 0.0 ? tau * r : (tau - 1.0) * r;
}

const std::vector<double>& scoring_tau_grid() {
    static const std::vector<double> taus = default_tau_grid();
    return taus;
}

EnergyScore energy_score(const Eigen::VectorXd& obs, const Eigen::MatrixXd& ens) {
    if (obs.size() != ens.cols()) throw ContractError("energy score: horizon mismatch");
    const Eigen::Index m = ens.rows();
    if (m < 1) throw ContractError("energy score: empty ensemble");

    EnergyScore s;
    for (Eigen::Index i = 0; i < m; ++i)
        s.ed += (ens.row(i).transpose() - obs).norm();
    s.ed /= static_cast<double>(m);

    if (m > 1) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i + 1; j < m; ++j)
                sum += (ens.row(i) - ens.row(j)).norm();
        s.ei = 2.0 * sum / (static_cast<double>(m) * static_cast<double>(m - 1));
    }
    s.es = s.ed - 0.5 * s.ei;
    return s;
}

double variogram_score(const Eigen::VectorXd& obs, const Eigen::MatrixXd& ens) {
    if (obs.size() != ens.cols()) throw ContractError("variogram score: horizon mismatch");
    const Eigen::Index t = obs.size();
    const Eigen::Index m = ens.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < t; ++j) {
            const double mean_abs =
                (ens.col(i) - ens.col(j)).cwiseAbs().sum() / static_cast<double>(m);
            const double d = std::abs(obs[i] - obs[j]) - mean_abs;
            total += d * d;
        }
    }
    return total / static_cast<double>(t * t);
}

double dawid_sebastiani(const Eigen::VectorXd& obs, const Eigen::MatrixXd& ens, bool* degenerate) {
    if (obs.size() != ens.cols()) throw ContractError("dss: horizon mismatch");
    const Eigen::Index m = ens.rows();
    if (degenerate != nullptr) *degenerate = false;
    if (m < 2) {
        if (degenerate != nullptr) *degenerate = true;
        return std::numeric_limits<double>::quiet_NaN();
    }

    const Eigen::RowVectorXd mean = ens.colwise().mean();
    const Eigen::MatrixXd centered = ens.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(m - 1);

    const double diag_scale = cov.trace() / static_cast<double>(cov.rows());
    if (!(diag_scale > 0.0)) {
        if (degenerate != nullptr) *degenerate = true;
        return std::numeric_limits<double>::quiet_NaN();
    }

    for (double rel = 1e-8; rel <= 1.0000001e-4; rel *= 10.0) {
        Eigen::MatrixXd reg = cov;
        reg.diagonal().array() += rel * diag_scale;
        const Eigen::LLT<Eigen::MatrixXd> llt(reg);
        if (llt.info() != Eigen::Success) continue;
        const double logdet =
            2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        const Eigen::VectorXd d = obs - mean.transpose();
        const double quad = d.dot(llt.solve(d));
        const double value = logdet + quad;
        if (std::isfinite(value)) return value;
    }
    if (degenerate != nullptr) *degenerate = true;
    return std::numeric_limits<double>::quiet_NaN();
}

CellScores score_cell(const Eigen::VectorXd& obs, const Eigen::MatrixXd& ens,
                      const std::vector<double>& taus) {
    if (obs.size() != ens.cols()) throw ContractError("score: horizon mismatch");
    if (!obs.allFinite() || !ens.allFinite()) throw DataError("score: non-finite inputs");
    const Eigen::Index t_steps = obs.size();
    const auto n_tau = static_cast<Eigen::Index>(taus.size());
    if (n_tau == 0) throw ContractError("score: empty quantile grid");

    CellScores s;
    const EnergyScore es = energy_score(obs, ens);
    s.es = es.es;
    s.ed = es.ed;
    s.ei = es.ei;
    s.vs = variogram_score(obs, ens);
    s.dss = dawid_sebastiani(obs, ens, &s.dss_degenerate);

    s.pb.resize(t_steps, n_tau);
    std::vector<double> sorted(static_cast<std::size_t>(ens.rows()));
    std::array<Eigen::Index, 3> covered{};
    for (Eigen::Index t = 0; t < t_steps; ++t) {
        for (Eigen::Index i = 0; i < ens.rows(); ++i)
            sorted[static_cast<std::size_t>(i)] = ens(i, t);
        std::sort(sorted.begin(), sorted.end());

        for (Eigen::Index k = 0; k < n_tau; ++k) {
            const double tau = taus[static_cast<std::size_t>(k)];
            s.pb(t, k) = pinball(tau, obs[t], quantile_type7(sorted, tau));
        }

        const double median = quantile_type7(sorted, 0.5);
        // Mean of the sorted values: invariant under member reordering.
        double mean = 0.0;
        for (double v : sorted) mean += v;
        mean /= static_cast<double>(sorted.size());
        s.mae += std::abs(obs[t] - median);
        s.mse += (obs[t] - mean) * (obs[t] - mean);

        for (std::size_t c = 0; c < kCoverageLevels.size(); ++c) {
            const double level = kCoverageLevels[c];
            const double lo = quantile_type7(sorted, (1.0 - level) / 2.0);
            const double hi = quantile_type7(sorted, (1.0 + level) / 2.0);
            if (lo < obs[t] && obs[t] < hi) ++covered[c];
        }
    }
    s.crps = s.pb.mean();
    s.mae /= static_cast<double>(t_steps);
    s.mse /= static_cast<double>(t_steps);
    for (std::size_t c = 0; c < kCoverageLevels.size(); ++c)
        s.coverage[c] = static_cast<double>(covered[c]) / static_cast<double>(t_steps);
    return s;
}

}  // namespace idtraj
