#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "idtraj/calendar.hpp"
#include "idtraj/marketdata.hpp"
#include "idtraj/rng.hpp"

namespace idtraj {

// Ground-truth process for synthetic market data. Trade arrival follows a
// logistic model on the trade-activity features; traded differences follow a
// t distribution whose location is linear in the difference lags and whose
// scale combines a linear part with two smooth effects (previous price level,
// step index) on the link scale. Windows up to the forecast origin use a
// simpler constant-rate process.
struct SynthConfig {
    int n_days = 140;
    std::vector<int> hours = {9, 17};
    Date start_day = make_date(2025, 1, 5);
    std::uint64_t seed = 1;
    GridSpec spec;

    Eigen::VectorXd logit_beta;  // 61, raw feature scale
    Eigen::VectorXd mu_beta;     // 3
    Eigen::VectorXd sigma_beta;  // 17, link scale
    double nu = 5.0;

    // Smooth scale effects.
    double price_curv = 0.0015;   // quadratic bowl around price_center
    double price_center = 45.0;
    double price_span = 60.0;     // curvature input clamp half-width
    double step_gain = 0.5;       // logistic rise toward delivery
    double step_mid = 22.0;
    double step_rate = 0.35;

    // Pre-origin window process.
    double pre_pi = 0.7;
    double pre_sigma = 0.8;

    // Day-ahead price chain (per hour, over days).
    double da_mean = 45.0;
    double da_ar = 0.8;
    double da_sd = 3.0;

    // Fundamental chains (per hour, over days).
    double fund_ar = 0.7;
    double fund_sd = 1.0;

    static SynthConfig defaults();

    double h_price(double prev_price) const;
    double h_step(double step) const;
};

Dataset generate_synthetic(const SynthConfig& config);

// Trajectories of the ground-truth process itself from a product's forecast
// origin, members x steps of price levels. Shares the step recursion with
// the generator.
Eigen::MatrixXd simulate_truth(const SynthConfig& config, const PriceGrid& grid,
                               const FundamentalRow& fund, int members, Rng& rng);

void write_truth_json(const std::filesystem::path& path, const SynthConfig& config);

// Raw exports (trades, fundamentals, day-ahead prices) that reproduce the
// dataset's grids exactly when ingested: every traded window is rendered as
// trades whose volume-weighted mean equals the grid price bit for bit, plus
// out-of-range trades that ingestion must clip.
void write_synthetic_raw(const std::filesystem::path& dir, const Dataset& dataset,
                         std::uint64_t seed);

}  // namespace idtraj
