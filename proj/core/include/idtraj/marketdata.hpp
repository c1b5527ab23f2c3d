#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idtraj/calendar.hpp"

namespace idtraj {

// Layout of the volume-weighted price grid around the forecast origin.
// Window ends run from earliest_min() down to latest_min() in spacing_min
// steps; index origin_index() is the forecast origin.
struct GridSpec {
    int pre_origin_lags = 12;  // windows kept before the origin
    int steps = 31;            // forecast horizons after the origin
    int spacing_min = 5;       // window width in minutes
    int origin_min = 185;      // origin window ends this many minutes pre delivery

    int total() const { return pre_origin_lags + 1 + steps; }
    int origin_index() const { return pre_origin_lags; }
    int earliest_min() const { return origin_min + spacing_min * pre_origin_lags; }
    int latest_min() const { return origin_min - spacing_min * steps; }
    // Grid index for a window ending end_min minutes before delivery.
    int index_for_end(int end_min) const { return (earliest_min() - end_min) / spacing_min; }
};

struct TradeRecord {
    Date delivery_day;
    int delivery_hour = 0;
    double exec_seconds = 0.0;  // seconds since epoch
    double price = 0.0;
    double volume = 0.0;
};

struct FundamentalRow {
    double load = 0.0;
    double solar = 0.0;
    double wind_on = 0.0;
    double wind_off = 0.0;
};

// One delivery product's VWAP path. Windows without trades carry the prior
// value forward (traded=false, diff 0); before any trade the level is the
// day-ahead auction price.
struct PriceGrid {
    Date day;
    int hour = 0;
    double da_price = 0.0;
    double pre_level = 0.0;            // level carried into the first window:
                                       // pre-grid trade VWAP, else da_price
    std::vector<double> prices;        // size GridSpec::total()
    std::vector<std::uint8_t> traded;  // same size
    std::vector<double> diffs;         // diffs[0] relative to pre_level
    int origin_index = 0;

    double origin_price() const { return prices[static_cast<std::size_t>(origin_index)]; }
    // Forecast-step accessors, t = 1..steps (t <= 0 reaches pre-origin lags).
    double price_at_step(int t) const { return prices[static_cast<std::size_t>(origin_index + t)]; }
    double diff_at_step(int t) const { return diffs[static_cast<std::size_t>(origin_index + t)]; }
    bool traded_at_step(int t) const { return traded[static_cast<std::size_t>(origin_index + t)] != 0; }

    void validate(const GridSpec& spec) const;
};

// Volume weighted average price; empty input yields no value.
std::optional<double> aggregate_vwap(const std::vector<std::pair<double, double>>& price_volume);

// Buckets this product's trades into windows aligned to the delivery start
// and applies the carry-forward / day-ahead fallback chain.
PriceGrid build_price_grid(const std::vector<TradeRecord>& trades, Date day, int hour,
                           double da_price, const GridSpec& spec = GridSpec{});

using ProductKey = std::pair<std::int32_t, int>;  // (day.days, hour)

inline ProductKey product_key(Date d, int hour) { return {d.days, hour}; }

// Normalized grid store consumed by the backtest.
struct Dataset {
    GridSpec spec;
    std::map<ProductKey, PriceGrid> grids;
    std::map<ProductKey, FundamentalRow> fundamentals;

    std::vector<Date> days() const;   // sorted unique delivery days
    std::vector<int> hours() const;   // sorted unique delivery hours
    const PriceGrid& grid(Date d, int hour) const;
    const FundamentalRow& fundamental(Date d, int hour) const;
    bool has(Date d, int hour) const;

    void save(const std::filesystem::path& dir) const;
    static Dataset load(const std::filesystem::path& dir);
};

// Raw CSV loaders (schemas: see README).
std::vector<TradeRecord> load_trades_csv(const std::filesystem::path& path);
std::map<ProductKey, FundamentalRow> load_fundamentals_csv(const std::filesystem::path& path);
std::map<ProductKey, double> load_da_price_csv(const std::filesystem::path& path);

// Validates raw CSVs and builds the grid store. Delivery days whose
// day-ahead curve has a DST-length hour count (23 or 25) are dropped.
Dataset ingest_raw(const std::filesystem::path& trades_csv,
                   const std::filesystem::path& fundamentals_csv,
                   const std::filesystem::path& da_csv, const GridSpec& spec,
                   std::vector<std::string>* warnings = nullptr);

}  // namespace idtraj
