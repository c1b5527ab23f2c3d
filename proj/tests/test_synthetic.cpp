#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "idtraj/designmatrix.hpp"
#include "idtraj/errors.hpp"
#include "idtraj/links.hpp"
#include "idtraj/marketdata.hpp"
#include "idtraj/synthetic.hpp"
#include "support/fsutil.hpp"

using namespace idtraj;
using idtraj::testing::TempDir;

namespace {

SynthConfig flat_config(double logit_intercept) {
    SynthConfig c = SynthConfig::defaults();
    c.logit_beta.setZero();
    c.logit_beta[0] = logit_intercept;
    c.mu_beta.setZero();
    c.sigma_beta.setZero();  // link scale: constant sigma of one
    c.price_curv = 0.0;
    c.step_gain = 0.0;
    return c;
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("configuration guards") {
    SynthConfig c = SynthConfig::defaults();
    c.n_days = 0;
    CHECK_THROWS_AS(generate_synthetic(c), ConfigError);
    c = SynthConfig::defaults();
    c.hours = {};
    CHECK_THROWS_AS(generate_synthetic(c), ConfigError);
    c = SynthConfig::defaults();
    c.hours = {24};
    CHECK_THROWS_AS(generate_synthetic(c), ConfigError);
    c = SynthConfig::defaults();
    c.logit_beta = Eigen::VectorXd::Zero(10);
    CHECK_THROWS_AS(generate_synthetic(c), ConfigError);
}

TEST_CASE("generation is deterministic in the seed") {
    SynthConfig c = SynthConfig::defaults();
    c.n_days = 8;
    c.hours = {9, 17};
    c.seed = 5;
    const Dataset a = generate_synthetic(c);
    const Dataset b = generate_synthetic(c);
    REQUIRE(a.grids.size() == 16);
    for (const auto& [key, grid] : a.grids) {
        const PriceGrid& other = b.grids.at(key);
        CHECK(grid.prices == other.prices);
        CHECK(grid.diffs == other.diffs);
        CHECK(grid.traded == other.traded);
        CHECK(grid.da_price == other.da_price);
    }

    c.seed = 6;
    const Dataset d = generate_synthetic(c);
    bool any_difference = false;
    for (const auto& [key, grid] : a.grids) {
        if (grid.prices != d.grids.at(key).prices) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("zero trade probability keeps every product at its day-ahead price") {
    SynthConfig c = flat_config(-40.0);
    c.pre_pi = 0.0;
    c.n_days = 6;
    c.hours = {12};
    const Dataset ds = generate_synthetic(c);
    for (const auto& [key, grid] : ds.grids) {
        CHECK(grid.pre_level == grid.da_price);
        for (std::size_t i = 0; i < grid.prices.size(); ++i) {
            CHECK(grid.prices[i] == grid.da_price);
            CHECK(grid.diffs[i] == 0.0);
            CHECK(grid.traded[i] == 0);
        }
    }
}

TEST_CASE("unit-scale differences have unit variance under the SD parameterization") {
    SynthConfig c = flat_config(40.0);  // always trades
    c.pre_pi = 1.0;
    c.pre_sigma = 1.0;
    c.nu = 5.0;
    c.n_days = 200;
    c.hours = {12};
    const Dataset ds = generate_synthetic(c);

    double sum = 0.0;
    double sumsq = 0.0;
    long n = 0;
    for (const auto& [key, grid] : ds.grids) {
        for (int t = 1; t <= c.spec.steps; ++t) {
            const double d = grid.diff_at_step(t);
            CHECK(grid.traded_at_step(t));
            sum += d;
            sumsq += d * d;
            ++n;
        }
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.06);
    // SD-parameterized t: the scale parameter is the standard deviation, so
    // the pooled variance sits at one, not nu/(nu-2).
    CHECK(std::abs(var - 1.0) < 0.12);
}

TEST_CASE("grids are internally consistent cumulative sums") {
    SynthConfig c = SynthConfig::defaults();
    c.n_days = 5;
    c.hours = {17};
    const Dataset ds = generate_synthetic(c);
    for (const auto& [key, grid] : ds.grids) {
        grid.validate(c.spec);
        CHECK(grid.pre_level == grid.da_price);
        CHECK(grid.prices[0] == grid.pre_level + grid.diffs[0]);
        for (std::size_t i = 1; i < grid.prices.size(); ++i) {
            CHECK(grid.prices[i] == grid.prices[i - 1] + grid.diffs[i]);
        }
    }
}

TEST_CASE("smooth scale effects match their closed forms") {
    const SynthConfig c = SynthConfig::defaults();
    const double bowl = c.price_curv * c.price_span * c.price_span;

    CHECK(c.h_price(c.price_center) == doctest::Approx(-bowl / 3.0).epsilon(1e-12));
    CHECK(c.h_price(c.price_center + c.price_span) ==
          doctest::Approx(2.0 * bowl / 3.0).epsilon(1e-12));
    CHECK(c.h_price(c.price_center - c.price_span) ==
          doctest::Approx(2.0 * bowl / 3.0).epsilon(1e-12));
    // Inputs clamp at one span from the center.
    CHECK(c.h_price(c.price_center + 2.0 * c.price_span) ==
          c.h_price(c.price_center + c.price_span));
    CHECK(c.h_price(-1e9) == c.h_price(c.price_center - c.price_span));

    CHECK(c.h_step(c.step_mid) == 0.0);
    CHECK(c.h_step(1e9) == doctest::Approx(c.step_gain / 2.0).epsilon(1e-9));
    CHECK(c.h_step(c.step_mid + 5.0) ==
          doctest::Approx(-c.h_step(c.step_mid - 5.0)).epsilon(1e-12));
}

TEST_CASE("truth trajectories share the generating recursion") {
    SynthConfig c = SynthConfig::defaults();
    c.n_days = 10;
    c.hours = {12};
    c.seed = 21;
    const Dataset ds = generate_synthetic(c);
    const Date day = ds.days().back();
    const PriceGrid& grid = ds.grid(day, 12);
    const FundamentalRow& fund = ds.fundamental(day, 12);

    Rng rng(301);
    const int members = 40000;
    const Eigen::MatrixXd paths = simulate_truth(c, grid, fund, members, rng);
    REQUIRE(paths.rows() == members);
    REQUIRE(paths.cols() == c.spec.steps);

    Rng rng_same(301);
    const Eigen::MatrixXd again = simulate_truth(c, grid, fund, members, rng_same);
    CHECK((paths.array() == again.array()).all());

    // First-step law recomputed from the public pieces of the truth process.
    const LagState state = lag_state_at(grid, 1);
    const int wday = weekday(day);
    const double eta_pi = c.logit_beta.dot(logit_row(state, wday, 1, fund, c.spec.steps));
    const double pi1 = 1.0 / (1.0 + std::exp(-std::clamp(eta_pi, -30.0, 30.0)));
    const double mu1 = c.mu_beta.dot(mu_row(state));
    const double eta_sigma = c.sigma_beta.dot(sigma_row(state, wday, fund)) +
                             c.h_price(state.prev_price) + c.h_step(1.0);
    const double sigma1 = link_sigma_inverse(eta_sigma);

    const double p0 = grid.origin_price();
    long traded = 0;
    double sum = 0.0;
    double sumsq = 0.0;
    for (int m = 0; m < members; ++m) {
        const double d = paths(m, 0) - p0;
        if (d == 0.0) continue;
        ++traded;
        sum += d;
        sumsq += d * d;
    }
    const double share = static_cast<double>(traded) / members;
    CHECK(std::abs(share - pi1) < 3.0 * std::sqrt(pi1 * (1.0 - pi1) / members));
    const double mean = sum / traded;
    const double sd = std::sqrt(sumsq / traded - mean * mean);
    CHECK(std::abs(mean - mu1) < 3.0 * sigma1 / std::sqrt(static_cast<double>(traded)));
    CHECK(std::abs(sd - sigma1) < 3.0 * sigma1 * std::sqrt(2.0 / traded));

    Rng bad(1);
    CHECK_THROWS_AS(simulate_truth(c, grid, fund, 0, bad), ConfigError);
}

TEST_CASE("the truth file records the generating coefficients") {
    TempDir dir("idtraj-truth");
    SynthConfig c = SynthConfig::defaults();
    c.seed = 77;
    const auto path = dir.path() / "truth.json";
    write_truth_json(path, c);

    std::ifstream in(path);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    CHECK(j.at("seed").get<std::string>() == "77");
    CHECK(j.at("nu").get<double>() == c.nu);
    CHECK(j.at("logit_beta").size() == 61);
    CHECK(j.at("logit_names").size() == 61);
    CHECK(j.at("mu_beta").size() == 3);
    CHECK(j.at("sigma_beta").size() == 17);
    CHECK(j.at("sigma_names").size() == 17);
    CHECK(j.at("logit_beta")[0].get<double>() == c.logit_beta[0]);
    CHECK(j.at("pre_pi").get<double>() == c.pre_pi);
}

TEST_CASE("raw exports reproduce the dataset bit for bit when ingested") {
    SynthConfig c = SynthConfig::defaults();
    c.n_days = 12;
    c.hours = {9, 17};
    c.seed = 33;
    const Dataset ds = generate_synthetic(c);

    TempDir dir("idtraj-raw");
    write_synthetic_raw(dir.path(), ds, c.seed);

    std::vector<std::string> warnings;
    const Dataset back = ingest_raw(dir.path() / "trades.csv", dir.path() / "fundamentals.csv",
                                    dir.path() / "da.csv", c.spec, &warnings);
    CHECK(warnings.empty());
    REQUIRE(back.grids.size() == ds.grids.size());
    for (const auto& [key, grid] : ds.grids) {
        REQUIRE(back.grids.count(key) == 1);
        const PriceGrid& other = back.grids.at(key);
        CHECK(grid.prices == other.prices);
        CHECK(grid.traded == other.traded);
        CHECK(grid.da_price == other.da_price);
        CHECK(grid.pre_level == other.pre_level);
        // Ingestion recomputes differences from the (bit-identical) levels,
        // so they can move by one rounding step relative to the draws.
        REQUIRE(grid.diffs.size() == other.diffs.size());
        for (std::size_t i = 0; i < grid.diffs.size(); ++i) {
            CHECK(std::abs(grid.diffs[i] - other.diffs[i]) < 1e-12);
        }

        const FundamentalRow& fa = ds.fundamentals.at(key);
        const FundamentalRow& fb = back.fundamentals.at(key);
        CHECK(fa.load == fb.load);
        CHECK(fa.solar == fb.solar);
        CHECK(fa.wind_on == fb.wind_on);
        CHECK(fa.wind_off == fb.wind_off);
    }
}

}  // TEST_SUITE
