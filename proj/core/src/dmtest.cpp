#include "idtraj/dmtest.hpp"

#include <cmath>

#include "idtraj/errors.hpp"
#include "idtraj/tdist.hpp"

namespace idtraj {

DmResult dm_test(const Eigen::MatrixXd& loss_a, const Eigen::MatrixXd& loss_b,
                 const DmOptions& options) {
    if (loss_a.rows() != loss_b.rows() || loss_a.cols() != loss_b.cols())
        throw ContractError("dm test: loss panels differ in shape");
    const Eigen::Index n = loss_a.rows();
    if (n < 30) throw ContractError("dm test: needs at least 30 days");
    if (!loss_a.allFinite() || !loss_b.allFinite())
        throw DataError("dm test: non-finite losses");

    const Eigen::VectorXd delta =
        loss_a.cwiseAbs().rowwise().sum() - loss_b.cwiseAbs().rowwise().sum();

    DmResult res;
    res.lag = options.lag >= 0
                  ? options.lag
                  : static_cast<int>(std::floor(std::cbrt(static_cast<double>(n))));
    if (res.lag >= n) res.lag = static_cast<int>(n) - 1;
    res.mean_diff = delta.mean();

    const Eigen::VectorXd centered = delta.array() - res.mean_diff;
    const double nd = static_cast<double>(n);
    double lrv = centered.squaredNorm() / nd;
    for (int l = 1; l <= res.lag; ++l) {
        double gamma = 0.0;
        for (Eigen::Index t = l; t < n; ++t) gamma += centered[t] * centered[t - l];
        gamma /= nd;
        lrv += 2.0 * (1.0 - static_cast<double>(l) / (res.lag + 1.0)) * gamma;
    }

    if (!(lrv > 0.0)) {
        res.degenerate = true;
        res.statistic = 0.0;
        res.p_a_better = res.mean_diff < 0.0 ? 0.0 : (res.mean_diff > 0.0 ? 1.0 : 0.5);
        res.p_b_better = 1.0 - res.p_a_better;
        return res;
    }

    res.statistic = res.mean_diff / std::sqrt(lrv / nd);
    res.p_a_better = normal_cdf(res.statistic);
    res.p_b_better = 1.0 - res.p_a_better;
    return res;
}

}  // namespace idtraj
