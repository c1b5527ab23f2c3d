#include "idtraj/designmatrix.hpp"

#include <cmath>

#include "idtraj/errors.hpp"

namespace idtraj {

namespace {

constexpr int kLogitDiffLags = 3;
constexpr int kAbsLags = 6;

void weekday_dummies(int wday, double* mon, double* sat, double* sun) {
    *mon = wday == 0 ? 1.0 : 0.0;
    *sat = wday == 5 ? 1.0 : 0.0;
    *sun = wday == 6 ? 1.0 : 0.0;
}

double pooled_abs_tail(const LagState& state) {
    double sum = 0.0;
    for (int j = kAbsLags; j < LagState::kLags; ++j) {
        sum += std::abs(state.diffs[static_cast<std::size_t>(j)]);
    }
    return sum;
}

}  // namespace

LagState lag_state_at(const PriceGrid& grid, int t) {
    LagState state;
    for (int j = 1; j <= LagState::kLags; ++j) {
        const int idx = grid.origin_index + t - j;
        if (idx < 0) throw ContractError("lag window reaches before the grid");
        state.diffs[static_cast<std::size_t>(j - 1)] = grid.diffs[static_cast<std::size_t>(idx)];
        state.alphas[static_cast<std::size_t>(j - 1)] =
            grid.traded[static_cast<std::size_t>(idx)] ? 1.0 : 0.0;
    }
    state.prev_price = grid.prices[static_cast<std::size_t>(grid.origin_index + t - 1)];
    return state;
}

Eigen::VectorXd logit_row(const LagState& state, int wday, int t,
                          const FundamentalRow& fund, int steps) {
    if (t < 1 || t > steps) throw ContractError("step index outside 1..steps");
    Eigen::VectorXd row(14 + steps + 4 + LagState::kLags);
    int k = 0;
    row[k++] = 1.0;
    for (int j = 0; j < kLogitDiffLags; ++j) row[k++] = state.diffs[static_cast<std::size_t>(j)];
    for (int j = 0; j < kAbsLags; ++j) row[k++] = std::abs(state.diffs[static_cast<std::size_t>(j)]);
    row[k++] = pooled_abs_tail(state);
    weekday_dummies(wday, &row[k], &row[k + 1], &row[k + 2]);
    k += 3;
    for (int j = 1; j <= steps; ++j) row[k++] = j == t ? 1.0 : 0.0;
    row[k++] = fund.load;
    row[k++] = fund.solar;
    row[k++] = fund.wind_on;
    row[k++] = fund.wind_off;
    // Expanding means of the activity lags: the j-th column averages the j
    // most recent indicators.
    double running = 0.0;
    for (int j = 1; j <= LagState::kLags; ++j) {
        running += state.alphas[static_cast<std::size_t>(j - 1)];
        row[k++] = running / j;
    }
    return row;
}

std::vector<std::string> logit_row_names(int steps) {
    std::vector<std::string> names = {"intercept"};
    for (int j = 1; j <= kLogitDiffLags; ++j) names.push_back("dp_lag" + std::to_string(j));
    for (int j = 1; j <= kAbsLags; ++j) names.push_back("absdp_lag" + std::to_string(j));
    names.push_back("absdp_lag7_12");
    names.insert(names.end(), {"monday", "saturday", "sunday"});
    for (int j = 1; j <= steps; ++j) names.push_back("ttm" + std::to_string(j));
    names.insert(names.end(), {"da_load", "da_solar", "da_wind_on", "da_wind_off"});
    for (int j = 1; j <= LagState::kLags; ++j) {
        names.push_back("activity_mean" + std::to_string(j));
    }
    return names;
}

Eigen::VectorXd mu_row(const LagState& state) {
    Eigen::VectorXd row(kLogitDiffLags);
    for (int j = 0; j < kLogitDiffLags; ++j) row[j] = state.diffs[static_cast<std::size_t>(j)];
    return row;
}

std::vector<std::string> mu_row_names() { return {"dp_lag1", "dp_lag2", "dp_lag3"}; }

Eigen::VectorXd sigma_row(const LagState& state, int wday, const FundamentalRow& fund) {
    Eigen::VectorXd row(17);
    int k = 0;
    row[k++] = 1.0;
    for (int j = 0; j < kAbsLags; ++j) row[k++] = std::abs(state.diffs[static_cast<std::size_t>(j)]);
    row[k++] = pooled_abs_tail(state);
    weekday_dummies(wday, &row[k], &row[k + 1], &row[k + 2]);
    k += 3;
    row[k++] = fund.load;
    row[k++] = fund.solar;
    row[k++] = fund.wind_on;
    row[k++] = fund.wind_off;
    row[k++] = state.alphas[0];
    row[k++] = state.alphas[1];
    return row;
}

std::vector<std::string> sigma_row_names() {
    std::vector<std::string> names = {"intercept"};
    for (int j = 1; j <= kAbsLags; ++j) names.push_back("absdp_lag" + std::to_string(j));
    names.push_back("absdp_lag7_12");
    names.insert(names.end(), {"monday", "saturday", "sunday", "da_load", "da_solar",
                               "da_wind_on", "da_wind_off", "alpha_lag1", "alpha_lag2"});
    return names;
}

Eigen::VectorXd lqr_row(const LagState& origin_state, double origin_price, int wday,
                        const FundamentalRow& fund) {
    Eigen::VectorXd row(21);
    int k = 0;
    row[k++] = 1.0;
    for (int j = 0; j < kLogitDiffLags; ++j) {
        row[k++] = origin_state.diffs[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < kAbsLags; ++j) {
        row[k++] = std::abs(origin_state.diffs[static_cast<std::size_t>(j)]);
    }
    row[k++] = pooled_abs_tail(origin_state);
    row[k++] = origin_price;
    weekday_dummies(wday, &row[k], &row[k + 1], &row[k + 2]);
    k += 3;
    row[k++] = origin_state.alphas[0];
    row[k++] = origin_state.alphas[1];
    row[k++] = fund.load;
    row[k++] = fund.solar;
    row[k++] = fund.wind_on;
    row[k++] = fund.wind_off;
    return row;
}

std::vector<std::string> lqr_row_names() {
    std::vector<std::string> names = {"intercept"};
    for (int j = 1; j <= kLogitDiffLags; ++j) names.push_back("dp_lag" + std::to_string(j));
    for (int j = 1; j <= kAbsLags; ++j) names.push_back("absdp_lag" + std::to_string(j));
    names.push_back("absdp_lag7_12");
    names.insert(names.end(), {"origin_price", "monday", "saturday", "sunday", "alpha_lag1",
                               "alpha_lag2", "da_load", "da_solar", "da_wind_on",
                               "da_wind_off"});
    return names;
}

Eigen::VectorXd Standardization::apply_row(const Eigen::VectorXd& row) const {
    if (row.size() != mean.size()) throw ContractError("standardization width mismatch");
    Eigen::VectorXd out(row.size());
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        out[j] = is_constant[static_cast<std::size_t>(j)] ? row[j]
                                                          : (row[j] - mean[j]) / scale[j];
    }
    return out;
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& x) const {
    if (x.cols() != mean.size()) throw ContractError("standardization width mismatch");
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (is_constant[static_cast<std::size_t>(j)]) {
            out.col(j) = x.col(j);
        } else {
            out.col(j) = (x.col(j).array() - mean[j]) / scale[j];
        }
    }
    return out;
}

Standardization fit_standardization(const Eigen::MatrixXd& x, bool first_is_intercept) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 2) throw EstimationError("standardization needs at least two rows");
    Standardization st;
    st.mean = Eigen::VectorXd::Zero(p);
    st.scale = Eigen::VectorXd::Ones(p);
    st.is_constant.assign(static_cast<std::size_t>(p), 0);
    for (Eigen::Index j = 0; j < p; ++j) {
        if (first_is_intercept && j == 0) {
            st.is_constant[0] = 1;
            continue;
        }
        const double mean = x.col(j).mean();
        const double ss = (x.col(j).array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd < 1e-12) {
            st.is_constant[static_cast<std::size_t>(j)] = 1;
        } else {
            st.mean[j] = mean;
            st.scale[j] = sd;
        }
    }
    return st;
}

LogitPanel build_logit_panel(const std::vector<ProductData>& window, const GridSpec& spec) {
    const int t_steps = spec.steps;
    const Eigen::Index n = static_cast<Eigen::Index>(window.size()) * t_steps;
    LogitPanel panel;
    panel.x.resize(n, 14 + t_steps + 4 + LagState::kLags);
    panel.y.resize(n);
    Eigen::Index r = 0;
    for (const ProductData& pd : window) {
        const int wday = weekday(pd.grid->day);
        for (int t = 1; t <= t_steps; ++t) {
            panel.x.row(r) =
                logit_row(lag_state_at(*pd.grid, t), wday, t, pd.fundamental, t_steps)
                    .transpose();
            panel.y[r] = pd.grid->traded_at_step(t) ? 1.0 : 0.0;
            ++r;
        }
    }
    return panel;
}

GamlssPanel build_gamlss_panel(const std::vector<ProductData>& window,
                               const GridSpec& spec) {
    const int t_steps = spec.steps;
    const Eigen::Index n = static_cast<Eigen::Index>(window.size()) * t_steps;
    GamlssPanel panel;
    panel.mu_x.resize(n, 3);
    panel.sigma_x.resize(n, 17);
    panel.prev_price.resize(n);
    panel.step.resize(n);
    panel.diff.resize(n);
    panel.alpha.resize(n);
    Eigen::Index r = 0;
    for (const ProductData& pd : window) {
        const int wday = weekday(pd.grid->day);
        for (int t = 1; t <= t_steps; ++t) {
            const LagState state = lag_state_at(*pd.grid, t);
            panel.mu_x.row(r) = mu_row(state).transpose();
            panel.sigma_x.row(r) = sigma_row(state, wday, pd.fundamental).transpose();
            panel.prev_price[r] = state.prev_price;
            panel.step[r] = t;
            panel.diff[r] = pd.grid->diff_at_step(t);
            panel.alpha[r] = pd.grid->traded_at_step(t) ? 1.0 : 0.0;
            ++r;
        }
    }
    return panel;
}

LqrPanel build_lqr_panel(const std::vector<ProductData>& window, const GridSpec& spec) {
    const int t_steps = spec.steps;
    LqrPanel panel;
    panel.x.resize(static_cast<Eigen::Index>(window.size()), 21);
    panel.targets.resize(static_cast<Eigen::Index>(window.size()), t_steps);
    Eigen::Index r = 0;
    for (const ProductData& pd : window) {
        const LagState state = lag_state_at(*pd.grid, 1);
        panel.x.row(r) =
            lqr_row(state, pd.grid->origin_price(), weekday(pd.grid->day), pd.fundamental)
                .transpose();
        for (int t = 1; t <= t_steps; ++t) {
            panel.targets(r, t - 1) = pd.grid->price_at_step(t) - pd.grid->origin_price();
        }
        ++r;
    }
    return panel;
}

Eigen::MatrixXd build_diff_matrix(const std::vector<ProductData>& window,
                                  const GridSpec& spec) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(window.size()), spec.steps);
    Eigen::Index r = 0;
    for (const ProductData& pd : window) {
        for (int t = 1; t <= spec.steps; ++t) {
            out(r, t - 1) = pd.grid->diff_at_step(t);
        }
        ++r;
    }
    return out;
}

}  // namespace idtraj
