#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "idtraj/marketdata.hpp"

namespace idtraj {

// Rolling per-path state feeding the feature builders. Index 0 is the most
// recent lag. Shared by in-sample panel assembly, the synthetic generator and
// recursive simulation, so all three see identical regressor definitions.
struct LagState {
    static constexpr int kLags = 12;
    std::array<double, kLags> diffs{};    // price diff lags 1..12
    std::array<double, kLags> alphas{};   // trade-activity lags 1..12
    double prev_price = 0.0;

    void push(double diff, double alpha, double price) {
        for (int j = kLags - 1; j > 0; --j) {
            diffs[static_cast<std::size_t>(j)] = diffs[static_cast<std::size_t>(j - 1)];
            alphas[static_cast<std::size_t>(j)] = alphas[static_cast<std::size_t>(j - 1)];
        }
        diffs[0] = diff;
        alphas[0] = alpha;
        prev_price = price;
    }
};

// Lag state as seen when forecasting step t of a realized grid (t = 1 uses
// only pre-origin information).
LagState lag_state_at(const PriceGrid& grid, int t);

// Trade-activity row: intercept, 3 signed diff lags, 6 absolute diff lags,
// pooled absolute lags 7-12, Mon/Sat/Sun, one-hot time-to-maturity over all
// steps, 4 fundamentals, 12 expanding-mean activity lags. 61 columns.
Eigen::VectorXd logit_row(const LagState& state, int wday, int t,
                          const FundamentalRow& fund, int steps = 31);
std::vector<std::string> logit_row_names(int steps = 31);

// Location row: 3 signed diff lags, no intercept.
Eigen::VectorXd mu_row(const LagState& state);
std::vector<std::string> mu_row_names();

// Scale row (linear part): intercept, 6 absolute diff lags, pooled absolute
// lags 7-12, Mon/Sat/Sun, 4 fundamentals, 2 activity lags. 17 columns. The
// smooth inputs (previous price, step index) are returned separately and
// never standardized.
Eigen::VectorXd sigma_row(const LagState& state, int wday, const FundamentalRow& fund);
std::vector<std::string> sigma_row_names();

// Forecast-origin row: intercept, 3 signed diff lags, 6 absolute diff lags,
// pooled absolute lags 7-12, origin price, Mon/Sat/Sun, 2 activity lags,
// 4 fundamentals. 21 columns.
Eigen::VectorXd lqr_row(const LagState& origin_state, double origin_price, int wday,
                        const FundamentalRow& fund);
std::vector<std::string> lqr_row_names();

// Column-wise location/scale transform fitted on training rows. The first
// column is expected to be an intercept and passes through unchanged, as do
// (flagged) constant columns. Scale is the n-1 sample standard deviation.
struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    std::vector<std::uint8_t> is_constant;

    Eigen::VectorXd apply_row(const Eigen::VectorXd& row) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

Standardization fit_standardization(const Eigen::MatrixXd& x, bool first_is_intercept = true);

// One product's grid and exogenous inputs.
struct ProductData {
    const PriceGrid* grid = nullptr;
    FundamentalRow fundamental;
};

// Stacked panels over an in-sample window (one row per day and step).
struct LogitPanel {
    Eigen::MatrixXd x;       // n x 61
    Eigen::VectorXd y;       // trade indicator
};
LogitPanel build_logit_panel(const std::vector<ProductData>& window, const GridSpec& spec);

struct GamlssPanel {
    Eigen::MatrixXd mu_x;      // n x 3
    Eigen::MatrixXd sigma_x;   // n x 17
    Eigen::VectorXd prev_price;  // smooth input 1
    Eigen::VectorXd step;        // smooth input 2
    Eigen::VectorXd diff;        // response
    Eigen::VectorXd alpha;       // trade indicator for subsetting
};
GamlssPanel build_gamlss_panel(const std::vector<ProductData>& window, const GridSpec& spec);

struct LqrPanel {
    Eigen::MatrixXd x;        // D x 21 origin rows
    Eigen::MatrixXd targets;  // D x steps, origin-to-horizon price differences
};
LqrPanel build_lqr_panel(const std::vector<ProductData>& window, const GridSpec& spec);

// D x steps matrix of per-step price differences after the origin.
Eigen::MatrixXd build_diff_matrix(const std::vector<ProductData>& window,
                                  const GridSpec& spec);

}  // namespace idtraj
