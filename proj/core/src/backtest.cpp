#include "idtraj/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "idtraj/copula.hpp"
#include "idtraj/csv.hpp"
#include "idtraj/dmtest.hpp"
#include "idtraj/errors.hpp"
#include "idtraj/scoring.hpp"

namespace idtraj {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json config_core_json(const BacktestConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["data_dir"] = c.data_dir.string();
    j["insample_days"] = c.insample_days;
    j["oos_days"] = c.oos_days;
    j["members"] = c.members;
    j["hours"] = c.hours;
    std::vector<std::string> names;
    names.reserve(c.models.size());
    for (ModelId id : c.models) names.push_back(model_name(id));
    j["models"] = names;
    j["master_seed"] = std::to_string(c.master_seed);
    j["stride"] = c.stride;
    return j;
}

}  // namespace

std::string BacktestConfig::to_json_string() const {
    json j = config_core_json(*this);
    j["dm_lag"] = dm_lag;
    return j.dump(2) + "\n";
}

std::uint64_t BacktestConfig::config_hash() const {
    return fnv1a(config_core_json(*this).dump());
}

void BacktestConfig::validate() const {
    if (data_dir.empty()) throw ConfigError("data_dir is required");
    if (insample_days < 1) throw ConfigError("insample_days must be positive");
    if (oos_days < 1) throw ConfigError("oos_days must be positive");
    if (members < 2) throw ConfigError("members must be at least 2");
    if (stride < 1) throw ConfigError("stride must be positive");
    if (jobs < 1) throw ConfigError("jobs must be positive");
    if (models.empty()) throw ConfigError("model list is empty");
    for (int h : hours) {
        if (h < 0 || h > 23) throw ConfigError("hour outside 0..23");
    }
}

BacktestConfig BacktestConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    static const std::set<std::string> allowed = {
        "schema_version", "data_dir", "insample_days", "oos_days", "members",
        "hours",          "models",   "master_seed",   "stride",   "dm_lag"};
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) throw ConfigError("unknown config key: " + item.key());
    }

    BacktestConfig c;
    try {
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
            throw ConfigError("unsupported config schema version");
        c.data_dir = j.at("data_dir").get<std::string>();
        if (j.contains("insample_days")) c.insample_days = j.at("insample_days").get<int>();
        if (j.contains("oos_days")) c.oos_days = j.at("oos_days").get<int>();
        if (j.contains("members")) c.members = j.at("members").get<int>();
        if (j.contains("hours")) c.hours = j.at("hours").get<std::vector<int>>();
        if (j.contains("models")) {
            c.models.clear();
            for (const auto& name : j.at("models"))
                c.models.push_back(model_from_name(name.get<std::string>()));
        }
        if (j.contains("master_seed")) {
            const auto& seed = j.at("master_seed");
            c.master_seed = seed.is_string() ? std::stoull(seed.get<std::string>())
                                             : seed.get<std::uint64_t>();
        }
        if (j.contains("stride")) c.stride = j.at("stride").get<int>();
        if (j.contains("dm_lag")) c.dm_lag = j.at("dm_lag").get<int>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
    c.validate();
    return c;
}

BacktestConfig BacktestConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& model, Date day, int hour) {
    return substream_seed(master_seed, model, static_cast<std::uint64_t>(day.days),
                          static_cast<std::uint64_t>(hour));
}

std::filesystem::path ensemble_path(const std::filesystem::path& run_dir,
                                    const std::string& model, Date day, int hour) {
    return run_dir / "ensembles" / model /
           (format_date(day) + "_" + std::to_string(hour) + ".csv");
}

namespace {

struct StudyLayout {
    std::vector<Date> days;       // all dataset days, ascending
    std::vector<int> hours;       // resolved delivery hours
    std::size_t first_oos = 0;    // index into `days`
};

StudyLayout resolve_layout(const BacktestConfig& config, const Dataset& dataset) {
    StudyLayout layout;
    layout.days = dataset.days();
    layout.hours = config.hours.empty() ? dataset.hours() : config.hours;
    if (layout.hours.empty()) throw DataError("dataset holds no delivery hours");
    const std::size_t need =
        static_cast<std::size_t>(config.insample_days) + static_cast<std::size_t>(config.oos_days);
    if (layout.days.size() < need) {
        throw DataError("dataset has " + std::to_string(layout.days.size()) +
                        " days, need " + std::to_string(need));
    }
    layout.first_oos = layout.days.size() - static_cast<std::size_t>(config.oos_days);
    return layout;
}

std::string sanitize(std::string message) {
    for (char& ch : message) {
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    }
    return message;
}

struct Task {
    int hour = 0;
    std::size_t block_begin = 0;  // day index of the first target in the block
    std::size_t block_end = 0;    // one past the last target
};

bool cell_reusable(const std::filesystem::path& path, const std::string& name, Date day,
                   int hour, std::uint64_t seed, std::uint64_t hash) {
    const auto meta = try_load_ensemble_meta(path);
    return meta && meta->model == name && meta->day == day && meta->hour == hour &&
           meta->seed == seed && meta->config_hash == hash;
}

void process_task(const BacktestConfig& config, const Dataset& dataset,
                  const StudyLayout& layout, const Task& task, RunStats& stats,
                  std::mutex& stats_mutex) {
    const std::uint64_t hash = config.config_hash();
    const int hour = task.hour;

    // Day indices (into layout.days) of products available for this hour.
    std::vector<std::size_t> avail;
    for (std::size_t i = 0; i < layout.days.size(); ++i) {
        if (dataset.has(layout.days[i], hour)) avail.push_back(i);
    }

    struct CellPlan {
        Date day{};
        ModelId id{};
        std::filesystem::path path;
        std::uint64_t seed = 0;
    };
    std::vector<CellPlan> todo;
    std::vector<std::pair<CellRef, std::string>> failures;
    int reused = 0;

    for (std::size_t i = task.block_begin; i < task.block_end; ++i) {
        const Date day = layout.days[i];
        if (!dataset.has(day, hour)) {
            for (ModelId id : config.models) {
                failures.push_back({{model_name(id), day, hour}, "missing target product"});
            }
            continue;
        }
        for (ModelId id : config.models) {
            const std::string name = model_name(id);
            const std::uint64_t seed = cell_seed(config.master_seed, name, day, hour);
            std::filesystem::path path = ensemble_path(config.out_dir, name, day, hour);
            if (cell_reusable(path, name, day, hour, seed, hash)) {
                ++reused;
            } else {
                todo.push_back({day, id, std::move(path), seed});
            }
        }
    }

    if (!todo.empty()) {
        // In-sample window: the most recent insample_days products for this
        // hour before the block start, shared by the whole block.
        const auto pos = std::lower_bound(avail.begin(), avail.end(), task.block_begin);
        const auto have = static_cast<std::size_t>(pos - avail.begin());
        if (have < static_cast<std::size_t>(config.insample_days)) {
            for (const CellPlan& plan : todo) {
                failures.push_back({{model_name(plan.id), plan.day, hour},
                                    "in-sample window has only " + std::to_string(have) +
                                        " products"});
            }
            todo.clear();
        }

        std::map<ModelId, FittedModel> fits;
        std::map<ModelId, std::string> fit_errors;
        if (!todo.empty()) {
            std::vector<ModelId> needed;
            for (const CellPlan& plan : todo) {
                if (std::find(needed.begin(), needed.end(), plan.id) == needed.end())
                    needed.push_back(plan.id);
            }
            std::vector<ProductData> window;
            window.reserve(static_cast<std::size_t>(config.insample_days));
            for (std::size_t k = have - static_cast<std::size_t>(config.insample_days); k < have;
                 ++k) {
                const Date day = layout.days[avail[k]];
                window.push_back({&dataset.grid(day, hour), dataset.fundamental(day, hour)});
            }
            try {
                for (auto& fitted : fit_models(needed, window, dataset.spec))
                    fits.emplace(fitted.id, std::move(fitted));
            } catch (const std::exception&) {
                // Refit one by one so a single failing model does not take
                // down the rest of the block.
                for (ModelId id : needed) {
                    try {
                        fits.emplace(id, fit_model(id, window, dataset.spec));
                    } catch (const std::exception& e) {
                        fit_errors[id] = e.what();
                    }
                }
            }
        }

        int computed = 0;
        for (const CellPlan& plan : todo) {
            const std::string name = model_name(plan.id);
            const auto err = fit_errors.find(plan.id);
            if (err != fit_errors.end()) {
                failures.push_back({{name, plan.day, hour}, sanitize(err->second)});
                continue;
            }
            try {
                const PriceGrid& grid = dataset.grid(plan.day, hour);
                const OriginState origin = make_origin_state(
                    grid, dataset.fundamental(plan.day, hour), weekday(plan.day));
                Rng rng(plan.seed);
                const Ensemble ens = simulate(fits.at(plan.id), origin, config.members, rng);
                std::filesystem::create_directories(plan.path.parent_path());
                EnsembleMeta meta;
                meta.model = name;
                meta.day = plan.day;
                meta.hour = hour;
                meta.seed = plan.seed;
                meta.config_hash = hash;
                save_ensemble(plan.path, ens, meta);
                ++computed;
            } catch (const std::exception& e) {
                failures.push_back({{name, plan.day, hour}, sanitize(e.what())});
            }
        }

        std::lock_guard<std::mutex> lock(stats_mutex);
        stats.computed += computed;
        stats.reused += reused;
        stats.failures.insert(stats.failures.end(), failures.begin(), failures.end());
        return;
    }

    std::lock_guard<std::mutex> lock(stats_mutex);
    stats.reused += reused;
    stats.failures.insert(stats.failures.end(), failures.begin(), failures.end());
}

void write_failures(const std::filesystem::path& run_dir,
                    std::vector<std::pair<CellRef, std::string>> failures) {
    std::sort(failures.begin(), failures.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.model, a.first.day.days, a.first.hour) <
               std::tie(b.first.model, b.first.day.days, b.first.hour);
    });
    CsvWriter out(run_dir / "failures.csv", {"model", "day", "hour", "error"});
    for (const auto& [ref, message] : failures) {
        out.write_row({ref.model, format_date(ref.day), std::to_string(ref.hour), message});
    }
    out.close();
}

}  // namespace

RunStats run_backtest(const BacktestConfig& config) {
    config.validate();
    if (config.out_dir.empty()) throw ConfigError("output directory is required");
    std::filesystem::create_directories(config.out_dir);

    const std::string canonical = config.to_json_string();
    const std::filesystem::path config_path = config.out_dir / "config.json";
    if (std::filesystem::exists(config_path)) {
        std::ifstream in(config_path, std::ios::binary);
        const std::string existing((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
        if (existing != canonical) {
            throw ConfigError("run directory holds a different configuration: " +
                              config_path.string());
        }
    } else {
        std::ofstream out(config_path, std::ios::binary);
        out << canonical;
        if (!out) throw DataError("failed writing " + config_path.string());
    }

    const Dataset dataset = Dataset::load(config.data_dir);
    const StudyLayout layout = resolve_layout(config, dataset);

    std::vector<Task> tasks;
    for (int hour : layout.hours) {
        for (std::size_t begin = layout.first_oos; begin < layout.days.size();
             begin += static_cast<std::size_t>(config.stride)) {
            const std::size_t end =
                std::min(begin + static_cast<std::size_t>(config.stride), layout.days.size());
            tasks.push_back({hour, begin, end});
        }
    }

    RunStats stats;
    std::mutex stats_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> fatal{false};
    std::string fatal_message;
    std::mutex fatal_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || fatal.load()) return;
            try {
                process_task(config, dataset, layout, tasks[i], stats, stats_mutex);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                fatal_message = e.what();
                fatal.store(true);
                return;
            }
        }
    };

    const std::size_t n_workers =
        std::min(static_cast<std::size_t>(config.jobs), std::max<std::size_t>(tasks.size(), 1));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (fatal.load()) throw DataError("backtest worker failed: " + fatal_message);

    write_failures(config.out_dir, stats.failures);
    evaluate_run(config.out_dir);
    return stats;
}

namespace {

struct ScoredCell {
    Date day{};
    int hour = 0;
    CellScores s;
};

struct ModelCells {
    std::string name;
    std::vector<ScoredCell> cells;
    int missing = 0;
};

Eigen::VectorXd realized_path(const PriceGrid& grid, const GridSpec& spec) {
    Eigen::VectorXd obs(spec.steps);
    for (int t = 1; t <= spec.steps; ++t) obs[t - 1] = grid.price_at_step(t);
    return obs;
}

std::vector<ModelCells> score_run(const BacktestConfig& config, const Dataset& dataset,
                                  const StudyLayout& layout,
                                  const std::filesystem::path& run_dir) {
    const std::uint64_t hash = config.config_hash();
    std::vector<ModelCells> out;
    for (ModelId id : config.models) {
        ModelCells mc;
        mc.name = model_name(id);
        for (std::size_t i = layout.first_oos; i < layout.days.size(); ++i) {
            const Date day = layout.days[i];
            for (int hour : layout.hours) {
                const std::filesystem::path path = ensemble_path(run_dir, mc.name, day, hour);
                if (!std::filesystem::exists(path) || !dataset.has(day, hour)) {
                    ++mc.missing;
                    continue;
                }
                EnsembleMeta meta;
                const Ensemble ens = load_ensemble(path, &meta);
                if (meta.model != mc.name || !(meta.day == day) || meta.hour != hour ||
                    meta.config_hash != hash) {
                    throw DataError("stale ensemble artifact: " + path.string());
                }
                if (ens.paths.rows() != config.members) {
                    throw DataError("ensemble member count mismatch: " + path.string());
                }
                const PriceGrid& grid = dataset.grid(day, hour);
                ScoredCell cell;
                cell.day = day;
                cell.hour = hour;
                cell.s = score_cell(realized_path(grid, dataset.spec), ens.paths,
                                    scoring_tau_grid());
                mc.cells.push_back(std::move(cell));
            }
        }
        out.push_back(std::move(mc));
    }
    return out;
}

struct Aggregate {
    int n = 0;
    double es = 0.0, crps = 0.0, vs = 0.0, mae = 0.0, mse = 0.0;
    double dss = 0.0;
    int n_dss = 0, n_dss_degenerate = 0;
    std::array<double, 3> cov{};

    void add(const CellScores& s) {
        ++n;
        es += s.es;
        crps += s.crps;
        vs += s.vs;
        mae += s.mae;
        mse += s.mse;
        if (s.dss_degenerate) {
            ++n_dss_degenerate;
        } else {
            dss += s.dss;
            ++n_dss;
        }
        for (std::size_t c = 0; c < cov.size(); ++c) cov[c] += s.coverage[c];
    }

    double mean_es() const { return es / n; }
    double mean_crps() const { return crps / n; }
    double mean_vs() const { return vs / n; }
    double mean_dss() const {
        return n_dss > 0 ? dss / n_dss : std::numeric_limits<double>::quiet_NaN();
    }
    double mean_mae() const { return mae / n; }
    double rmse() const { return std::sqrt(mse / n); }
    double mean_cov(std::size_t c) const { return cov[c] / n; }
};

void write_summary_row(CsvWriter& out, const std::string& label, const Aggregate& agg) {
    out.write_row({label, std::to_string(agg.n), format_double(agg.mean_es()),
                   format_double(agg.mean_crps()), format_double(agg.mean_vs()),
                   format_double(agg.mean_dss()), std::to_string(agg.n_dss_degenerate),
                   format_double(agg.mean_mae()), format_double(agg.rmse()),
                   format_double(agg.mean_cov(0)), format_double(agg.mean_cov(1)),
                   format_double(agg.mean_cov(2))});
}

void write_dm_table(const std::filesystem::path& path, const std::vector<ModelCells>& scored,
                    const StudyLayout& layout, int lag, bool use_crps) {
    const auto n_days = layout.days.size() - layout.first_oos;
    const auto n_hours = layout.hours.size();

    // Complete day x hour loss panels; incomplete models get NaN columns.
    std::map<std::string, Eigen::MatrixXd> losses;
    for (const ModelCells& mc : scored) {
        if (mc.missing > 0 || mc.cells.size() != n_days * n_hours) continue;
        Eigen::MatrixXd m(n_days, n_hours);
        std::size_t k = 0;
        for (std::size_t d = 0; d < n_days; ++d) {
            for (std::size_t h = 0; h < n_hours; ++h) {
                const ScoredCell& cell = mc.cells[k++];
                m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(h)) =
                    use_crps ? cell.s.crps : cell.s.es;
            }
        }
        losses.emplace(mc.name, std::move(m));
    }

    std::vector<std::string> header = {"model"};
    for (const ModelCells& mc : scored) header.push_back(mc.name);
    CsvWriter out(path, header);
    for (const ModelCells& a : scored) {
        std::vector<std::string> row = {a.name};
        for (const ModelCells& b : scored) {
            double p = std::numeric_limits<double>::quiet_NaN();
            const auto ia = losses.find(a.name);
            const auto ib = losses.find(b.name);
            if (a.name != b.name && ia != losses.end() && ib != losses.end() &&
                static_cast<int>(n_days) >= 30) {
                DmOptions opt;
                opt.lag = lag;
                p = dm_test(ia->second, ib->second, opt).p_a_better;
            }
            row.push_back(format_double(p));
        }
        out.write_row(row);
    }
    out.close();
}

}  // namespace

void evaluate_run(const std::filesystem::path& run_dir) {
    const BacktestConfig config = BacktestConfig::from_json_file(run_dir / "config.json");
    const Dataset dataset = Dataset::load(config.data_dir);
    const StudyLayout layout = resolve_layout(config, dataset);
    const std::vector<ModelCells> scored = score_run(config, dataset, layout, run_dir);

    std::filesystem::create_directories(run_dir / "scores");
    std::filesystem::create_directories(run_dir / "dm");

    CsvWriter panel(run_dir / "scores" / "panel.csv",
                    {"model", "day", "hour", "es", "ed", "ei", "crps", "vs", "dss",
                     "dss_degenerate", "mae", "mse", "cov_50", "cov_90", "cov_99"});
    for (const ModelCells& mc : scored) {
        for (const ScoredCell& cell : mc.cells) {
            panel.write_row({mc.name, format_date(cell.day), std::to_string(cell.hour),
                             format_double(cell.s.es), format_double(cell.s.ed),
                             format_double(cell.s.ei), format_double(cell.s.crps),
                             format_double(cell.s.vs), format_double(cell.s.dss),
                             cell.s.dss_degenerate ? "1" : "0", format_double(cell.s.mae),
                             format_double(cell.s.mse), format_double(cell.s.coverage[0]),
                             format_double(cell.s.coverage[1]),
                             format_double(cell.s.coverage[2])});
        }
    }
    panel.close();

    CsvWriter summary(run_dir / "scores" / "summary.csv",
                      {"model", "n_cells", "es", "crps", "vs", "dss", "n_dss_degenerate",
                       "mae", "rmse", "cov_50", "cov_90", "cov_99"});
    for (const ModelCells& mc : scored) {
        if (mc.cells.empty()) {
            summary.write_row({mc.name, "0", "nan", "nan", "nan", "nan", "0", "nan", "nan",
                               "nan", "nan", "nan"});
            continue;
        }
        Aggregate agg;
        for (const ScoredCell& cell : mc.cells) agg.add(cell.s);
        write_summary_row(summary, mc.name, agg);
    }
    summary.close();

    const std::vector<double>& taus = scoring_tau_grid();
    CsvWriter detail(run_dir / "scores" / "detail_pb.csv", {"model", "step", "tau", "pinball"});
    for (const ModelCells& mc : scored) {
        if (mc.cells.empty()) continue;
        Eigen::MatrixXd pb = Eigen::MatrixXd::Zero(mc.cells.front().s.pb.rows(),
                                                   mc.cells.front().s.pb.cols());
        for (const ScoredCell& cell : mc.cells) pb += cell.s.pb;
        pb /= static_cast<double>(mc.cells.size());
        for (Eigen::Index t = 0; t < pb.rows(); ++t) {
            for (Eigen::Index k = 0; k < pb.cols(); ++k) {
                detail.write_row({mc.name, std::to_string(t + 1),
                                  format_double(taus[static_cast<std::size_t>(k)]),
                                  format_double(pb(t, k))});
            }
        }
    }
    detail.close();

    write_dm_table(run_dir / "dm" / "es_pvalues.csv", scored, layout, config.dm_lag, false);
    write_dm_table(run_dir / "dm" / "crps_pvalues.csv", scored, layout, config.dm_lag, true);
}

void run_copula_experiment(const std::filesystem::path& run_dir, const std::string& base_model) {
    const BacktestConfig config = BacktestConfig::from_json_file(run_dir / "config.json");
    const Dataset dataset = Dataset::load(config.data_dir);
    const StudyLayout layout = resolve_layout(config, dataset);
    model_from_name(base_model);  // validates the name

    struct Variant {
        const char* label;
        CopulaKind kind;
    };
    const Variant variants[] = {
        {"comonotone", CopulaKind::comonotone},
        {"countermonotone", CopulaKind::countermonotone},
        {"independence", CopulaKind::independence},
    };

    Aggregate original;
    std::array<Aggregate, 3> reordered{};
    const std::vector<double>& taus = scoring_tau_grid();

    for (std::size_t i = layout.first_oos; i < layout.days.size(); ++i) {
        const Date day = layout.days[i];
        for (int hour : layout.hours) {
            const std::filesystem::path path = ensemble_path(run_dir, base_model, day, hour);
            if (!std::filesystem::exists(path) || !dataset.has(day, hour)) continue;
            const Ensemble ens = load_ensemble(path);
            const Eigen::VectorXd obs = realized_path(dataset.grid(day, hour), dataset.spec);
            const CellScores base = score_cell(obs, ens.paths, taus);
            original.add(base);

            for (std::size_t v = 0; v < 3; ++v) {
                CopulaSpec spec;
                spec.kind = variants[v].kind;
                Rng rng(substream_seed(config.master_seed,
                                       std::string("copula-") + variants[v].label + "-" +
                                           base_model,
                                       static_cast<std::uint64_t>(day.days),
                                       static_cast<std::uint64_t>(hour)));
                const Eigen::MatrixXd shuffled = reorder_to_copula(ens.paths, spec, rng);
                const CellScores s = score_cell(obs, shuffled, taus);
                // Reordering permutes members within each horizon, so every
                // marginal statistic must be bit-identical.
                if (s.crps != base.crps || s.mae != base.mae || s.mse != base.mse ||
                    s.coverage != base.coverage || s.pb != base.pb) {
                    throw ContractError("dependence reordering moved a marginal statistic");
                }
                reordered[v].add(s);
            }
        }
    }
    if (original.n == 0) {
        throw DataError("no ensembles found for model " + base_model + " under " +
                        run_dir.string());
    }

    std::filesystem::create_directories(run_dir / "copula");
    CsvWriter out(run_dir / "copula" / "table.csv",
                  {"variant", "n_cells", "es", "crps", "vs", "dss", "n_dss_degenerate", "mae",
                   "rmse", "cov_50", "cov_90", "cov_99"});
    write_summary_row(out, "original", original);
    for (std::size_t v = 0; v < 3; ++v) write_summary_row(out, variants[v].label, reordered[v]);
    out.close();
}

void write_reports(const std::filesystem::path& run_dir) {
    const CsvTable panel = read_csv(run_dir / "scores" / "panel.csv");
    const CsvTable detail = read_csv(run_dir / "scores" / "detail_pb.csv");
    std::filesystem::create_directories(run_dir / "report");

    const std::size_t c_model = panel.require_column("model");
    const std::size_t c_hour = panel.require_column("hour");
    const std::size_t c_es = panel.require_column("es");
    const std::size_t c_cov50 = panel.require_column("cov_50");
    const std::size_t c_cov90 = panel.require_column("cov_90");
    const std::size_t c_cov99 = panel.require_column("cov_99");

    std::vector<std::string> model_order;
    std::map<std::string, std::map<int, std::pair<double, int>>> es_by_hour;
    std::map<std::string, std::array<std::pair<double, int>, 3>> cov_by_model;
    for (const auto& row : panel.rows) {
        const std::string& model = row[c_model];
        if (std::find(model_order.begin(), model_order.end(), model) == model_order.end())
            model_order.push_back(model);
        const int hour = static_cast<int>(parse_long(row[c_hour]));
        auto& [sum, count] = es_by_hour[model][hour];
        sum += parse_double(row[c_es]);
        count += 1;
        auto& cov = cov_by_model[model];
        const std::array<std::size_t, 3> cols = {c_cov50, c_cov90, c_cov99};
        for (std::size_t c = 0; c < 3; ++c) {
            cov[c].first += parse_double(row[cols[c]]);
            cov[c].second += 1;
        }
    }

    CsvWriter per_hour(run_dir / "report" / "per_hour_es.csv", {"model", "hour", "es"});
    for (const std::string& model : model_order) {
        for (const auto& [hour, acc] : es_by_hour[model]) {
            per_hour.write_row({model, std::to_string(hour),
                                format_double(acc.first / acc.second)});
        }
    }
    per_hour.close();

    CsvWriter coverage(run_dir / "report" / "coverage.csv", {"model", "level", "empirical"});
    for (const std::string& model : model_order) {
        const auto& cov = cov_by_model[model];
        for (std::size_t c = 0; c < 3; ++c) {
            coverage.write_row({model, format_double(kCoverageLevels[c]),
                                format_double(cov[c].first / cov[c].second)});
        }
    }
    coverage.close();

    const std::size_t d_model = detail.require_column("model");
    const std::size_t d_step = detail.require_column("step");
    const std::size_t d_tau = detail.require_column("tau");
    const std::size_t d_pb = detail.require_column("pinball");

    std::vector<std::string> detail_order;
    std::map<std::string, std::map<int, std::pair<double, int>>> pb_by_step;
    std::map<std::string, std::map<double, std::pair<double, int>>> pb_by_tau;
    for (const auto& row : detail.rows) {
        const std::string& model = row[d_model];
        if (std::find(detail_order.begin(), detail_order.end(), model) == detail_order.end())
            detail_order.push_back(model);
        const int step = static_cast<int>(parse_long(row[d_step]));
        const double tau = parse_double(row[d_tau]);
        const double pb = parse_double(row[d_pb]);
        auto& by_step = pb_by_step[model][step];
        by_step.first += pb;
        by_step.second += 1;
        auto& by_tau = pb_by_tau[model][tau];
        by_tau.first += pb;
        by_tau.second += 1;
    }

    CsvWriter per_step(run_dir / "report" / "per_step_crps.csv", {"model", "step", "crps"});
    for (const std::string& model : detail_order) {
        for (const auto& [step, acc] : pb_by_step[model]) {
            per_step.write_row({model, std::to_string(step),
                                format_double(acc.first / acc.second)});
        }
    }
    per_step.close();

    CsvWriter per_tau(run_dir / "report" / "per_tau_pinball.csv", {"model", "tau", "pinball"});
    for (const std::string& model : detail_order) {
        for (const auto& [tau, acc] : pb_by_tau[model]) {
            per_tau.write_row({model, format_double(tau), format_double(acc.first / acc.second)});
        }
    }
    per_tau.close();
}

}  // namespace idtraj
