#pragma once

#include <Eigen/Dense>

namespace idtraj {

struct DmOptions {
    int lag = -1;  // negative: floor(N^(1/3))
};

struct DmResult {
    double statistic = 0.0;
    double p_a_better = 1.0;  // low when A's losses are smaller
    double p_b_better = 0.0;  // exact complement, the two sum to one
    bool degenerate = false;  // zero long-run variance
    int lag = 0;
    double mean_diff = 0.0;
};

// Paired forecast comparison on daily loss totals. Rows are days, columns
// products; the per-day statistic is the l1 norm gap between the two loss
// vectors. The long-run variance uses Bartlett weights up to `lag`.
DmResult dm_test(const Eigen::MatrixXd& loss_a, const Eigen::MatrixXd& loss_b,
                 const DmOptions& options = {});

}  // namespace idtraj
