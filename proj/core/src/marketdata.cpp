#include "idtraj/marketdata.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "idtraj/csv.hpp"
#include "idtraj/errors.hpp"

namespace idtraj {

void PriceGrid::validate(const GridSpec& spec) const {
    const std::size_t n = static_cast<std::size_t>(spec.total());
    if (prices.size() != n || traded.size() != n || diffs.size() != n) {
        throw ContractError("grid arrays have wrong length");
    }
    if (origin_index != spec.origin_index()) throw ContractError("origin index mismatch");
    if (!std::isfinite(pre_level)) throw ContractError("non-finite pre-grid level");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(prices[i])) throw ContractError("non-finite grid price");
        const double prev = i == 0 ? pre_level : prices[i - 1];
        if (std::abs(diffs[i] - (prices[i] - prev)) > 1e-9) {
            throw ContractError("diff inconsistent with prices");
        }
        if (!traded[i] && diffs[i] != 0.0) {
            throw ContractError("untraded window with nonzero diff");
        }
    }
}

std::optional<double> aggregate_vwap(
    const std::vector<std::pair<double, double>>& price_volume) {
    if (price_volume.empty()) return std::nullopt;
    double pv = 0.0;
    double v = 0.0;
    for (const auto& [price, volume] : price_volume) {
        if (!(volume > 0.0)) throw InputError("trade volume must be positive");
        if (!std::isfinite(price)) throw InputError("non-finite trade price");
        pv += price * volume;
        v += volume;
    }
    return pv / v;
}

PriceGrid build_price_grid(const std::vector<TradeRecord>& trades, Date day, int hour,
                           double da_price, const GridSpec& spec) {
    if (!std::isfinite(da_price)) throw DataError("missing day-ahead price");
    const double delivery_sec = static_cast<double>(day.days) * 86400.0 + hour * 3600.0;
    const double wsec = spec.spacing_min * 60.0;

    // Bucket trades by window end-minutes e: a trade m minutes before
    // delivery falls in the window (e, e + spacing]. Windows fully after the
    // last tracked one (m <= latest_min) are out of scope.
    std::map<int, std::vector<std::pair<double, double>>, std::greater<int>> buckets;
    for (const TradeRecord& tr : trades) {
        if (product_key(tr.delivery_day, tr.delivery_hour) != product_key(day, hour)) {
            throw ContractError("trade belongs to another product");
        }
        const double m_sec = delivery_sec - tr.exec_seconds;
        if (!(m_sec > 0.0)) throw InputError("trade executed at or after delivery");
        const int k = static_cast<int>(std::ceil(m_sec / wsec)) - 1;
        const int end_min = k * spec.spacing_min;
        if (end_min < spec.latest_min()) continue;
        buckets[end_min].push_back({tr.price, tr.volume});
    }

    PriceGrid grid;
    grid.day = day;
    grid.hour = hour;
    grid.da_price = da_price;
    grid.origin_index = spec.origin_index();
    const int n = spec.total();
    grid.prices.assign(static_cast<std::size_t>(n), 0.0);
    grid.traded.assign(static_cast<std::size_t>(n), 0);
    grid.diffs.assign(static_cast<std::size_t>(n), 0.0);

    // Walk forward in time (descending end-minutes), carrying the last value;
    // trades older than the tracked grid still seed the chain.
    double level = da_price;
    auto it = buckets.begin();
    for (; it != buckets.end() && it->first > spec.earliest_min(); ++it) {
        level = *aggregate_vwap(it->second);
    }
    grid.pre_level = level;
    double prev = level;
    for (int i = 0; i < n; ++i) {
        const int end_min = spec.earliest_min() - i * spec.spacing_min;
        bool traded_here = false;
        if (it != buckets.end() && it->first == end_min) {
            level = *aggregate_vwap(it->second);
            traded_here = true;
            ++it;
        }
        grid.prices[static_cast<std::size_t>(i)] = level;
        grid.traded[static_cast<std::size_t>(i)] = traded_here ? 1 : 0;
        grid.diffs[static_cast<std::size_t>(i)] = level - prev;
        prev = level;
    }
    grid.validate(spec);
    return grid;
}

std::vector<Date> Dataset::days() const {
    std::set<std::int32_t> seen;
    for (const auto& [key, _] : grids) seen.insert(key.first);
    std::vector<Date> out;
    out.reserve(seen.size());
    for (std::int32_t d : seen) out.push_back(Date{d});
    return out;
}

std::vector<int> Dataset::hours() const {
    std::set<int> seen;
    for (const auto& [key, _] : grids) seen.insert(key.second);
    return {seen.begin(), seen.end()};
}

const PriceGrid& Dataset::grid(Date d, int hour) const {
    const auto it = grids.find(product_key(d, hour));
    if (it == grids.end()) {
        throw DataError("no grid for " + format_date(d) + " hour " + std::to_string(hour));
    }
    return it->second;
}

const FundamentalRow& Dataset::fundamental(Date d, int hour) const {
    const auto it = fundamentals.find(product_key(d, hour));
    if (it == fundamentals.end()) {
        throw DataError("no fundamentals for " + format_date(d) + " hour " +
                        std::to_string(hour));
    }
    return it->second;
}

bool Dataset::has(Date d, int hour) const {
    return grids.count(product_key(d, hour)) > 0 &&
           fundamentals.count(product_key(d, hour)) > 0;
}

void Dataset::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    const int n = spec.total();
    std::vector<std::string> header = {"day", "hour", "da_price", "pre_level"};
    for (int i = 0; i < n; ++i) header.push_back("p" + std::to_string(i));
    for (int i = 0; i < n; ++i) header.push_back("a" + std::to_string(i));
    CsvWriter grid_out(dir / "grids.csv", header);
    for (const auto& [key, grid] : grids) {
        std::vector<std::string> row;
        row.reserve(header.size());
        row.push_back(format_date(Date{key.first}));
        row.push_back(std::to_string(key.second));
        row.push_back(format_double(grid.da_price));
        row.push_back(format_double(grid.pre_level));
        for (double p : grid.prices) row.push_back(format_double(p));
        for (std::uint8_t a : grid.traded) row.push_back(a ? "1" : "0");
        grid_out.write_row(row);
    }
    grid_out.close();

    CsvWriter fund_out(dir / "fundamentals.csv",
                       {"day", "hour", "da_load", "da_solar", "da_wind_on", "da_wind_off"});
    for (const auto& [key, f] : fundamentals) {
        fund_out.write_row({format_date(Date{key.first}), std::to_string(key.second),
                            format_double(f.load), format_double(f.solar),
                            format_double(f.wind_on), format_double(f.wind_off)});
    }
    fund_out.close();

    CsvWriter spec_out(dir / "gridspec.csv",
                       {"pre_origin_lags", "steps", "spacing_min", "origin_min"});
    spec_out.write_row({std::to_string(spec.pre_origin_lags), std::to_string(spec.steps),
                        std::to_string(spec.spacing_min), std::to_string(spec.origin_min)});
    spec_out.close();
}

Dataset Dataset::load(const std::filesystem::path& dir) {
    Dataset ds;
    const CsvTable spec_table = read_csv(dir / "gridspec.csv");
    if (spec_table.rows.size() != 1) throw DataError("bad gridspec.csv");
    ds.spec.pre_origin_lags =
        static_cast<int>(parse_long(spec_table.rows[0][static_cast<std::size_t>(
            spec_table.require_column("pre_origin_lags"))]));
    ds.spec.steps = static_cast<int>(parse_long(
        spec_table.rows[0][static_cast<std::size_t>(spec_table.require_column("steps"))]));
    ds.spec.spacing_min = static_cast<int>(parse_long(
        spec_table.rows[0][static_cast<std::size_t>(spec_table.require_column("spacing_min"))]));
    ds.spec.origin_min = static_cast<int>(parse_long(
        spec_table.rows[0][static_cast<std::size_t>(spec_table.require_column("origin_min"))]));

    const int n = ds.spec.total();
    const CsvTable grid_table = read_csv(dir / "grids.csv");
    const int day_col = grid_table.require_column("day");
    const int hour_col = grid_table.require_column("hour");
    const int da_col = grid_table.require_column("da_price");
    const int pre_col = grid_table.require_column("pre_level");
    const int p0 = grid_table.require_column("p0");
    const int a0 = grid_table.require_column("a0");
    for (const auto& row : grid_table.rows) {
        PriceGrid grid;
        grid.day = parse_date(row[static_cast<std::size_t>(day_col)]);
        grid.hour = static_cast<int>(parse_long(row[static_cast<std::size_t>(hour_col)]));
        grid.da_price = parse_double(row[static_cast<std::size_t>(da_col)]);
        grid.pre_level = parse_double(row[static_cast<std::size_t>(pre_col)]);
        grid.origin_index = ds.spec.origin_index();
        grid.prices.resize(static_cast<std::size_t>(n));
        grid.traded.resize(static_cast<std::size_t>(n));
        grid.diffs.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            grid.prices[static_cast<std::size_t>(i)] =
                parse_double(row[static_cast<std::size_t>(p0 + i)]);
            grid.traded[static_cast<std::size_t>(i)] =
                parse_long(row[static_cast<std::size_t>(a0 + i)]) ? 1 : 0;
            const double prev =
                i == 0 ? grid.pre_level : grid.prices[static_cast<std::size_t>(i - 1)];
            grid.diffs[static_cast<std::size_t>(i)] =
                grid.prices[static_cast<std::size_t>(i)] - prev;
        }
        grid.validate(ds.spec);
        ds.grids.emplace(product_key(grid.day, grid.hour), std::move(grid));
    }

    const CsvTable fund_table =
        read_csv(dir / "fundamentals.csv",
                 {"day", "hour", "da_load", "da_solar", "da_wind_on", "da_wind_off"});
    for (const auto& row : fund_table.rows) {
        const Date day = parse_date(row[0]);
        const int hour = static_cast<int>(parse_long(row[1]));
        FundamentalRow f{parse_double(row[2]), parse_double(row[3]), parse_double(row[4]),
                         parse_double(row[5])};
        ds.fundamentals.emplace(product_key(day, hour), f);
    }
    return ds;
}

std::vector<TradeRecord> load_trades_csv(const std::filesystem::path& path) {
    const CsvTable table =
        read_csv(path, {"delivery_day", "delivery_hour", "exec_ts", "price", "volume"});
    std::vector<TradeRecord> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        TradeRecord tr;
        tr.delivery_day = parse_date(row[0]);
        tr.delivery_hour = static_cast<int>(parse_long(row[1]));
        if (tr.delivery_hour < 0 || tr.delivery_hour > 23) {
            throw InputError("delivery hour outside 0..23");
        }
        tr.exec_seconds = parse_timestamp(row[2]);
        tr.price = parse_double(row[3]);
        tr.volume = parse_double(row[4]);
        if (!(tr.volume > 0.0)) throw InputError("trade volume must be positive");
        out.push_back(tr);
    }
    return out;
}

std::map<ProductKey, FundamentalRow> load_fundamentals_csv(
    const std::filesystem::path& path) {
    const CsvTable table = read_csv(
        path, {"day", "hour", "da_load", "da_solar", "da_wind_on", "da_wind_off"});
    std::map<ProductKey, FundamentalRow> out;
    for (const auto& row : table.rows) {
        const Date day = parse_date(row[0]);
        const int hour = static_cast<int>(parse_long(row[1]));
        FundamentalRow f{parse_double(row[2]), parse_double(row[3]), parse_double(row[4]),
                         parse_double(row[5])};
        if (!(f.load > 0.0)) throw InputError("day-ahead load must be positive");
        for (double v : {f.load, f.solar, f.wind_on, f.wind_off}) {
            if (!std::isfinite(v)) throw InputError("non-finite fundamental value");
        }
        out[product_key(day, hour)] = f;
    }
    return out;
}

std::map<ProductKey, double> load_da_price_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path, {"day", "hour", "da_price"});
    std::map<ProductKey, double> out;
    for (const auto& row : table.rows) {
        const Date day = parse_date(row[0]);
        const int hour = static_cast<int>(parse_long(row[1]));
        out[product_key(day, hour)] = parse_double(row[2]);
    }
    return out;
}

Dataset ingest_raw(const std::filesystem::path& trades_csv,
                   const std::filesystem::path& fundamentals_csv,
                   const std::filesystem::path& da_csv, const GridSpec& spec,
                   std::vector<std::string>* warnings) {
    const auto trades = load_trades_csv(trades_csv);
    auto fundamentals = load_fundamentals_csv(fundamentals_csv);
    const auto da = load_da_price_csv(da_csv);

    // DST day detection from the day-ahead curve: 23 or 25 delivery hours.
    std::map<std::int32_t, int> hours_per_day;
    for (const auto& [key, _] : da) hours_per_day[key.first] += 1;
    std::set<std::int32_t> dropped;
    for (const auto& [day, count] : hours_per_day) {
        if (count == 23 || count == 25) {
            dropped.insert(day);
            if (warnings) {
                warnings->push_back("dropping DST delivery day " + format_date(Date{day}) +
                                    " (" + std::to_string(count) + " hours)");
            }
        }
    }

    std::map<ProductKey, std::vector<TradeRecord>> by_product;
    for (const TradeRecord& tr : trades) {
        by_product[product_key(tr.delivery_day, tr.delivery_hour)].push_back(tr);
    }

    Dataset ds;
    ds.spec = spec;
    for (const auto& [key, da_price] : da) {
        if (dropped.count(key.first)) continue;
        if (!fundamentals.count(key)) {
            if (warnings) {
                warnings->push_back("skipping product " + format_date(Date{key.first}) +
                                    " h" + std::to_string(key.second) +
                                    ": no fundamentals");
            }
            continue;
        }
        const auto it = by_product.find(key);
        static const std::vector<TradeRecord> no_trades;
        const auto& product_trades = it == by_product.end() ? no_trades : it->second;
        ds.grids.emplace(key, build_price_grid(product_trades, Date{key.first}, key.second,
                                               da_price, spec));
        ds.fundamentals.emplace(key, fundamentals.at(key));
    }
    if (ds.grids.empty()) throw DataError("ingest produced an empty dataset");
    return ds;
}

}  // namespace idtraj
