#include "idtraj/synthetic.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "idtraj/csv.hpp"
#include "idtraj/designmatrix.hpp"
#include "idtraj/errors.hpp"
#include "idtraj/links.hpp"
#include "idtraj/rng.hpp"
#include "idtraj/tdist.hpp"

namespace idtraj {

SynthConfig SynthConfig::defaults() {
    SynthConfig c;
    const int steps = c.spec.steps;

    c.logit_beta = Eigen::VectorXd::Zero(14 + steps + 4 + LagState::kLags);
    int k = 0;
    c.logit_beta[k++] = 1.0;                                   // intercept
    for (double v : {0.10, 0.05, 0.02}) c.logit_beta[k++] = v;  // signed diff lags
    for (double v : {0.15, 0.10, 0.08, 0.05, 0.03, 0.02}) c.logit_beta[k++] = v;
    c.logit_beta[k++] = 0.01;                                  // pooled lags 7-12
    c.logit_beta[k++] = -0.20;                                 // Monday
    c.logit_beta[k++] = -0.40;                                 // Saturday
    c.logit_beta[k++] = -0.50;                                 // Sunday
    for (int t = 1; t <= steps; ++t) {                          // activity ramps up
        c.logit_beta[k++] = -0.4 + 2.2 * (t - 1.0) / (steps - 1.0);
    }
    for (double v : {0.30, -0.10, 0.20, 0.05}) c.logit_beta[k++] = v;
    for (int j = 1; j <= LagState::kLags; ++j) {
        c.logit_beta[k++] = 0.6 / j;
    }

    c.mu_beta = Eigen::VectorXd(3);
    c.mu_beta << -0.35, -0.20, -0.10;

    c.sigma_beta = Eigen::VectorXd::Zero(17);
    k = 0;
    c.sigma_beta[k++] = -0.20;                                 // intercept, link scale
    for (double v : {0.25, 0.15, 0.10, 0.06, 0.04, 0.02}) c.sigma_beta[k++] = v;
    c.sigma_beta[k++] = 0.01;                                  // pooled lags 7-12
    c.sigma_beta[k++] = 0.05;                                  // Monday
    c.sigma_beta[k++] = 0.10;                                  // Saturday
    c.sigma_beta[k++] = 0.12;                                  // Sunday
    for (double v : {0.05, 0.02, 0.03, 0.01}) c.sigma_beta[k++] = v;
    c.sigma_beta[k++] = -0.10;                                 // activity lag 1
    c.sigma_beta[k++] = -0.05;                                 // activity lag 2
    return c;
}

double SynthConfig::h_price(double prev_price) const {
    const double x =
        std::clamp(prev_price, price_center - price_span, price_center + price_span) -
        price_center;
    return price_curv * x * x - price_curv * price_span * price_span / 3.0;
}

double SynthConfig::h_step(double step) const {
    return step_gain / (1.0 + std::exp(-step_rate * (step - step_mid))) - step_gain / 2.0;
}

namespace {

double chain_step(double prev, double mean, double ar, double sd, Rng& rng) {
    return mean + ar * (prev - mean) + sd * normal_quantile(rng.uniform());
}

double chain_start(double mean, double ar, double sd, Rng& rng) {
    const double stat_sd = sd / std::sqrt(1.0 - ar * ar);
    return mean + stat_sd * normal_quantile(rng.uniform());
}

struct TruthStep {
    double pi;
    double mu;
    double sigma;
};

TruthStep truth_step(const SynthConfig& c, const LagState& state, int wday, int t,
                     const FundamentalRow& fund) {
    TruthStep s;
    const double eta_pi = c.logit_beta.dot(logit_row(state, wday, t, fund, c.spec.steps));
    s.pi = 1.0 / (1.0 + std::exp(-std::clamp(eta_pi, -30.0, 30.0)));
    s.mu = c.mu_beta.dot(mu_row(state));
    const double eta_sigma = c.sigma_beta.dot(sigma_row(state, wday, fund)) +
                             c.h_price(state.prev_price) +
                             c.h_step(static_cast<double>(t));
    s.sigma = std::clamp(link_sigma_inverse(std::clamp(eta_sigma, -15.0, 10.0)), 1e-8, 1e6);
    return s;
}

PriceGrid generate_grid(const SynthConfig& c, Date day, int hour, double da_price,
                        const FundamentalRow& fund, Rng& rng) {
    const GridSpec& spec = c.spec;
    const int n = spec.total();
    const int wday = weekday(day);

    PriceGrid grid;
    grid.day = day;
    grid.hour = hour;
    grid.da_price = da_price;
    grid.pre_level = da_price;
    grid.origin_index = spec.origin_index();
    grid.prices.assign(static_cast<std::size_t>(n), 0.0);
    grid.traded.assign(static_cast<std::size_t>(n), 0);
    grid.diffs.assign(static_cast<std::size_t>(n), 0.0);

    LagState state;
    state.prev_price = da_price;
    double level = da_price;

    for (int i = 0; i < n; ++i) {
        const double u_branch = rng.uniform();
        const double u_value = rng.uniform();
        double diff = 0.0;
        double alpha = 0.0;
        if (i <= spec.origin_index()) {
            if (u_branch < c.pre_pi) {
                alpha = 1.0;
                diff = t3_quantile(u_value, 0.0, c.pre_sigma, c.nu);
            }
        } else {
            const int t = i - spec.origin_index();
            const TruthStep ts = truth_step(c, state, wday, t, fund);
            if (u_branch < ts.pi) {
                alpha = 1.0;
                diff = t3_quantile(u_value, ts.mu, ts.sigma, c.nu);
            }
        }
        level += diff;
        grid.prices[static_cast<std::size_t>(i)] = level;
        grid.traded[static_cast<std::size_t>(i)] = alpha > 0.0 ? 1 : 0;
        grid.diffs[static_cast<std::size_t>(i)] = diff;
        state.push(diff, alpha, level);
    }
    grid.validate(spec);
    return grid;
}

}  // namespace

Eigen::MatrixXd simulate_truth(const SynthConfig& config, const PriceGrid& grid,
                               const FundamentalRow& fund, int members, Rng& rng) {
    const GridSpec& spec = config.spec;
    if (members < 1) throw ConfigError("need at least one ensemble member");
    grid.validate(spec);
    const int wday = weekday(grid.day);
    const LagState origin = lag_state_at(grid, 1);

    Eigen::MatrixXd paths(members, spec.steps);
    for (int m = 0; m < members; ++m) {
        LagState state = origin;
        double level = state.prev_price;
        for (int t = 1; t <= spec.steps; ++t) {
            const double u_branch = rng.uniform();
            const double u_value = rng.uniform();
            const TruthStep ts = truth_step(config, state, wday, t, fund);
            double diff = 0.0;
            double alpha = 0.0;
            if (u_branch < ts.pi) {
                alpha = 1.0;
                diff = t3_quantile(u_value, ts.mu, ts.sigma, config.nu);
            }
            level += diff;
            paths(m, t - 1) = level;
            state.push(diff, alpha, level);
        }
    }
    return paths;
}

Dataset generate_synthetic(const SynthConfig& config) {
    if (config.n_days < 1) throw ConfigError("synthetic data needs at least one day");
    if (config.hours.empty()) throw ConfigError("synthetic data needs at least one hour");
    for (int h : config.hours) {
        if (h < 0 || h > 23) throw ConfigError("delivery hour outside 0..23");
    }
    const Eigen::Index want_logit = 14 + config.spec.steps + 4 + LagState::kLags;
    if (config.logit_beta.size() != want_logit || config.mu_beta.size() != 3 ||
        config.sigma_beta.size() != 17) {
        throw ConfigError("truth coefficient vectors have wrong sizes");
    }

    Dataset ds;
    ds.spec = config.spec;
    for (int hour : config.hours) {
        Rng da_rng(substream_seed(config.seed, "synth-da", static_cast<std::uint64_t>(hour)));
        Rng fund_rng(substream_seed(config.seed, "synth-fund", static_cast<std::uint64_t>(hour)));
        double da = chain_start(config.da_mean, config.da_ar, config.da_sd, da_rng);
        std::array<double, 4> fz{};
        for (auto& z : fz) z = chain_start(0.0, config.fund_ar, config.fund_sd, fund_rng);

        for (int d = 0; d < config.n_days; ++d) {
            const Date day{config.start_day.days + d};
            if (d > 0) {
                da = chain_step(da, config.da_mean, config.da_ar, config.da_sd, da_rng);
                for (auto& z : fz) z = chain_step(z, 0.0, config.fund_ar, config.fund_sd, fund_rng);
            }
            FundamentalRow fund;
            fund.load = std::exp(0.3 * fz[0]);
            fund.solar = fz[1];
            fund.wind_on = fz[2];
            fund.wind_off = fz[3];

            Rng grid_rng(substream_seed(config.seed, "synth-grid",
                                        static_cast<std::uint64_t>(day.days),
                                        static_cast<std::uint64_t>(hour)));
            const ProductKey key = product_key(day, hour);
            ds.grids.emplace(key, generate_grid(config, day, hour, da, fund, grid_rng));
            ds.fundamentals.emplace(key, fund);
        }
    }
    return ds;
}

void write_truth_json(const std::filesystem::path& path, const SynthConfig& config) {
    nlohmann::json j;
    j["n_days"] = config.n_days;
    j["hours"] = config.hours;
    j["start_day"] = format_date(config.start_day);
    j["seed"] = std::to_string(config.seed);
    j["nu"] = config.nu;
    j["logit_beta"] =
        std::vector<double>(config.logit_beta.data(), config.logit_beta.data() + config.logit_beta.size());
    j["logit_names"] = logit_row_names(config.spec.steps);
    j["mu_beta"] =
        std::vector<double>(config.mu_beta.data(), config.mu_beta.data() + config.mu_beta.size());
    j["mu_names"] = mu_row_names();
    j["sigma_beta"] =
        std::vector<double>(config.sigma_beta.data(), config.sigma_beta.data() + config.sigma_beta.size());
    j["sigma_names"] = sigma_row_names();
    j["price_curv"] = config.price_curv;
    j["price_center"] = config.price_center;
    j["price_span"] = config.price_span;
    j["step_gain"] = config.step_gain;
    j["step_mid"] = config.step_mid;
    j["step_rate"] = config.step_rate;
    j["pre_pi"] = config.pre_pi;
    j["pre_sigma"] = config.pre_sigma;
    j["da_mean"] = config.da_mean;
    j["da_ar"] = config.da_ar;
    j["da_sd"] = config.da_sd;
    j["fund_ar"] = config.fund_ar;
    j["fund_sd"] = config.fund_sd;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

namespace {

std::string format_epoch_seconds(double seconds) {
    const auto total = static_cast<std::int64_t>(std::llround(seconds));
    std::int64_t days = total / 86400;
    std::int64_t tod = total - days * 86400;
    if (tod < 0) {
        tod += 86400;
        days -= 1;
    }
    const auto [y, mo, da] = to_ymd(Date{static_cast<std::int32_t>(days)});
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", y, mo, da,
                  static_cast<int>(tod / 3600), static_cast<int>((tod % 3600) / 60),
                  static_cast<int>(tod % 60));
    return buf;
}

}  // namespace

void write_synthetic_raw(const std::filesystem::path& dir, const Dataset& dataset,
                         std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const GridSpec& spec = dataset.spec;

    CsvWriter trades(dir / "trades.csv",
                     {"delivery_day", "delivery_hour", "exec_ts", "price", "volume"});
    CsvWriter funds(dir / "fundamentals.csv",
                    {"day", "hour", "da_load", "da_solar", "da_wind_on", "da_wind_off"});
    CsvWriter da(dir / "da.csv", {"day", "hour", "da_price"});

    // Volumes stay powers of two and trades within a window share one price,
    // so the ingested volume-weighted average reproduces the grid price bit
    // for bit.
    const double kVolumes[] = {1.0, 2.0, 4.0, 8.0};

    for (const auto& [key, grid] : dataset.grids) {
        const Date day{key.first};
        const int hour = key.second;
        Rng rng(substream_seed(seed, "synth-raw", static_cast<std::uint64_t>(day.days),
                               static_cast<std::uint64_t>(hour)));
        const double delivery_sec = static_cast<double>(day.days) * 86400.0 + hour * 3600.0;
        const std::string day_str = format_date(day);
        const std::string hour_str = std::to_string(hour);

        const FundamentalRow& f = dataset.fundamentals.at(key);
        funds.write_row({day_str, hour_str, format_double(f.load), format_double(f.solar),
                         format_double(f.wind_on), format_double(f.wind_off)});
        da.write_row({day_str, hour_str, format_double(grid.da_price)});

        // A pre-grid trade at the day-ahead price and a too-late trade: the
        // first seeds the carry-forward chain with an unchanged level, the
        // second must be clipped.
        trades.write_row({day_str, hour_str,
                          format_epoch_seconds(delivery_sec - (spec.earliest_min() + 9) * 60.0),
                          format_double(grid.da_price), format_double(2.0)});
        trades.write_row({day_str, hour_str,
                          format_epoch_seconds(delivery_sec - (spec.latest_min() - 10) * 60.0),
                          format_double(9999.0), format_double(4.0)});

        for (int i = 0; i < spec.total(); ++i) {
            if (!grid.traded[static_cast<std::size_t>(i)]) continue;
            const int end_min = spec.earliest_min() - i * spec.spacing_min;
            const double price = grid.prices[static_cast<std::size_t>(i)];
            const int n_trades = 1 << rng.uniform_index(3);  // 1, 2 or 4
            const double volume = kVolumes[rng.uniform_index(4)];
            for (int r = 0; r < n_trades; ++r) {
                const double offset_sec = 30.0 + 60.0 * static_cast<double>(rng.uniform_index(4));
                trades.write_row({day_str, hour_str,
                                  format_epoch_seconds(delivery_sec - end_min * 60.0 - offset_sec),
                                  format_double(price), format_double(volume)});
            }
        }
    }
    trades.close();
    funds.close();
    da.close();
}

}  // namespace idtraj
