#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "idtraj/calendar.hpp"
#include "idtraj/models.hpp"

namespace idtraj {

// Rolling-origin study configuration. The JSON form carries everything that
// defines the artifacts; output directory and worker count are runtime knobs
// passed separately. Unknown JSON keys are rejected.
struct BacktestConfig {
    std::filesystem::path data_dir;
    int insample_days = 90;
    int oos_days = 40;
    int members = 200;
    std::vector<int> hours;                       // empty: every hour present
    std::vector<ModelId> models = all_models();
    std::uint64_t master_seed = 1;
    int stride = 1;   // refit cadence in days
    int dm_lag = -1;  // negative: automatic

    // Runtime knobs, not part of the stored config or its hash.
    std::filesystem::path out_dir;
    int jobs = 1;

    static BacktestConfig from_json_file(const std::filesystem::path& path);
    static BacktestConfig from_json_string(const std::string& text);
    std::string to_json_string() const;
    // Hash over the fields that determine simulation artifacts.
    std::uint64_t config_hash() const;

    void validate() const;
};

struct CellRef {
    std::string model;
    Date day{};
    int hour = 0;
};

struct RunStats {
    int computed = 0;
    int reused = 0;
    std::vector<std::pair<CellRef, std::string>> failures;
};

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& model, Date day, int hour);
std::filesystem::path ensemble_path(const std::filesystem::path& run_dir,
                                    const std::string& model, Date day, int hour);

// Simulates every (model, day, hour) cell of the out-of-sample span, reusing
// artifacts whose metadata matches the configuration hash, then evaluates.
// Per-cell estimation failures are isolated and listed in failures.csv.
RunStats run_backtest(const BacktestConfig& config);

// Rescores the stored ensembles of a finished (or partial) run: writes
// scores/panel.csv, scores/summary.csv, scores/detail_pb.csv and the pairwise
// comparison tables dm/es_pvalues.csv, dm/crps_pvalues.csv.
void evaluate_run(const std::filesystem::path& run_dir);

// Rescores one model's ensembles under imposed dependence structures and
// writes copula/table.csv. Statistics that only depend on per-horizon
// marginals must not move; that invariance is asserted.
void run_copula_experiment(const std::filesystem::path& run_dir, const std::string& base_model);

// Aggregated views of an evaluated run under report/.
void write_reports(const std::filesystem::path& run_dir);

}  // namespace idtraj
