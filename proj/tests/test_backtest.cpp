#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "idtraj/backtest.hpp"
#include "idtraj/csv.hpp"
#include "idtraj/errors.hpp"
#include "idtraj/synthetic.hpp"
#include "support/fsutil.hpp"

using namespace idtraj;
using idtraj::testing::TempDir;
using idtraj::testing::compare_trees;
using idtraj::testing::slurp;

namespace {

namespace fs = std::filesystem;

// A 40-day two-hour dataset with a Naive + RW.N study run once; `snapshot`
// holds a byte copy of the finished run directory.
struct BtFixture {
    TempDir data{"idtraj-bt-data"};
    TempDir out1{"idtraj-bt-run"};
    TempDir snapshot{"idtraj-bt-snap"};
    BacktestConfig config;
    RunStats first;

    BtFixture() {
        SynthConfig synth = SynthConfig::defaults();
        synth.n_days = 40;
        synth.hours = {9, 17};
        synth.seed = 3;
        generate_synthetic(synth).save(data.path());

        config.data_dir = data.path();
        config.insample_days = 30;
        config.oos_days = 5;
        config.members = 10;
        config.models = {ModelId::naive, ModelId::rw_normal};
        config.master_seed = 11;
        config.stride = 2;
        config.out_dir = out1.path();
        config.jobs = 1;
        first = run_backtest(config);
        fs::copy(out1.path(), snapshot.path(), fs::copy_options::recursive);
    }
};

BtFixture& fixture() {
    static BtFixture f;
    return f;
}

}  // namespace

TEST_SUITE("backtest") {

TEST_CASE("config json round trips and rejects junk") {
    BacktestConfig c;
    c.data_dir = "/tmp/data";
    c.hours = {9, 17};
    c.members = 50;
    c.master_seed = 123456789012345ull;
    c.dm_lag = 2;
    const std::string text = c.to_json_string();
    const BacktestConfig back = BacktestConfig::from_json_string(text);
    CHECK(back.to_json_string() == text);
    CHECK(back.members == 50);
    CHECK(back.master_seed == c.master_seed);
    CHECK(back.dm_lag == 2);
    CHECK(back.models == c.models);

    CHECK_THROWS_AS(BacktestConfig::from_json_string("{"), ConfigError);
    CHECK_THROWS_AS(BacktestConfig::from_json_string(R"({"data_dir":"x","nope":1})"),
                    ConfigError);
    CHECK_THROWS_AS(BacktestConfig::from_json_string(R"({"data_dir":"x","members":1})"),
                    ConfigError);
    CHECK_THROWS_AS(BacktestConfig::from_json_string(R"({"data_dir":"x","stride":0})"),
                    ConfigError);
    CHECK_THROWS_AS(BacktestConfig::from_json_string(R"({"data_dir":"x","hours":[24]})"),
                    ConfigError);
    CHECK_THROWS_AS(BacktestConfig::from_json_string(R"({"data_dir":"x","models":[]})"),
                    ConfigError);
    CHECK_THROWS_AS(BacktestConfig::from_json_string(R"({"data_dir":""})"), ConfigError);
    CHECK_THROWS_AS(BacktestConfig::from_json_file("/nonexistent/config.json"), ConfigError);

    // Seeds may arrive as numbers or strings.
    const BacktestConfig numeric =
        BacktestConfig::from_json_string(R"({"data_dir":"x","master_seed":7})");
    CHECK(numeric.master_seed == 7);
}

TEST_CASE("config hash covers artifacts, not runtime knobs") {
    BacktestConfig a;
    a.data_dir = "/tmp/data";
    BacktestConfig b = a;
    b.out_dir = "/somewhere/else";
    b.jobs = 16;
    b.dm_lag = 5;  // evaluation-only parameter
    CHECK(a.config_hash() == b.config_hash());

    BacktestConfig c = a;
    c.master_seed = 2;
    CHECK(c.config_hash() != a.config_hash());
    c = a;
    c.members = 99;
    CHECK(c.config_hash() != a.config_hash());
    c = a;
    c.stride = 3;
    CHECK(c.config_hash() != a.config_hash());
    c = a;
    c.models = {ModelId::naive};
    CHECK(c.config_hash() != a.config_hash());
    c = a;
    c.hours = {9};
    CHECK(c.config_hash() != a.config_hash());
}

TEST_CASE("cell seeds and artifact paths are distinct and stable") {
    const Date day = make_date(2025, 4, 1);
    const std::uint64_t s1 = cell_seed(1, "Naive", day, 9);
    CHECK(s1 == cell_seed(1, "Naive", day, 9));
    CHECK(s1 != cell_seed(1, "RW.N", day, 9));
    CHECK(s1 != cell_seed(1, "Naive", Date{day.days + 1}, 9));
    CHECK(s1 != cell_seed(1, "Naive", day, 10));
    CHECK(s1 != cell_seed(2, "Naive", day, 9));

    CHECK(ensemble_path("/runs/x", "Naive", day, 9) ==
          fs::path("/runs/x/ensembles/Naive/2025-04-01_9.csv"));
}

TEST_CASE("a finished run holds every expected artifact") {
    const BtFixture& f = fixture();
    CHECK(f.first.computed == 20);  // 5 days x 2 hours x 2 models
    CHECK(f.first.reused == 0);
    CHECK(f.first.failures.empty());

    const fs::path run = f.config.out_dir;
    CHECK(fs::exists(run / "config.json"));
    CHECK(slurp(run / "failures.csv") == "model,day,hour,error\n");
    CHECK(fs::exists(run / "scores" / "panel.csv"));
    CHECK(fs::exists(run / "scores" / "summary.csv"));
    CHECK(fs::exists(run / "scores" / "detail_pb.csv"));
    CHECK(fs::exists(run / "dm" / "es_pvalues.csv"));
    CHECK(fs::exists(run / "dm" / "crps_pvalues.csv"));

    const CsvTable panel = read_csv(run / "scores" / "panel.csv");
    CHECK(panel.rows.size() == 20);
    const CsvTable summary = read_csv(run / "scores" / "summary.csv");
    REQUIRE(summary.rows.size() == 2);
    CHECK(summary.rows[0][0] == "Naive");
    CHECK(summary.rows[1][0] == "RW.N");
    CHECK(summary.rows[0][summary.require_column("n_cells")] == "10");

    // Stored members and metadata match the plan.
    const std::vector<Date> days = Dataset::load(f.config.data_dir).days();
    const Date first_oos = days[days.size() - 5];
    const fs::path cell = ensemble_path(run, "Naive", first_oos, 9);
    EnsembleMeta meta;
    const Ensemble ens = load_ensemble(cell, &meta);
    CHECK(ens.paths.rows() == 10);
    CHECK(ens.paths.cols() == 31);
    CHECK(meta.seed == cell_seed(f.config.master_seed, "Naive", first_oos, 9));
    CHECK(meta.config_hash == f.config.config_hash());

    // Empty hours resolved to the dataset's hours.
    CHECK(fs::exists(ensemble_path(run, "RW.N", first_oos, 17)));
}

TEST_CASE("reruns reuse all artifacts and leave bytes untouched") {
    const BtFixture& f = fixture();
    const RunStats again = run_backtest(f.config);
    CHECK(again.computed == 0);
    CHECK(again.reused == 20);
    CHECK(again.failures.empty());
    CHECK(compare_trees(f.config.out_dir, f.snapshot.path()) == "");
}

TEST_CASE("a deleted artifact is regenerated bit for bit") {
    const BtFixture& f = fixture();
    const std::vector<Date> days = Dataset::load(f.config.data_dir).days();
    const Date target = days[days.size() - 3];
    const fs::path victim = ensemble_path(f.config.out_dir, "RW.N", target, 17);
    REQUIRE(fs::exists(victim));
    fs::remove(victim);
    fs::remove(fs::path(victim.string() + ".meta.json"));

    const RunStats resumed = run_backtest(f.config);
    CHECK(resumed.computed == 1);
    CHECK(resumed.reused == 19);
    CHECK(compare_trees(f.config.out_dir, f.snapshot.path()) == "");
}

TEST_CASE("worker count does not change any byte") {
    const BtFixture& f = fixture();
    TempDir out2("idtraj-bt-jobs");
    BacktestConfig parallel = f.config;
    parallel.out_dir = out2.path();
    parallel.jobs = 3;
    const RunStats stats = run_backtest(parallel);
    CHECK(stats.computed == 20);
    CHECK(compare_trees(out2.path(), f.snapshot.path()) == "");
}

TEST_CASE("a run directory refuses a different configuration") {
    const BtFixture& f = fixture();
    BacktestConfig other = f.config;
    other.members = 12;
    CHECK_THROWS_AS(run_backtest(other), ConfigError);

    BacktestConfig no_out = f.config;
    no_out.out_dir.clear();
    CHECK_THROWS_AS(run_backtest(no_out), ConfigError);

    TempDir out3("idtraj-bt-short");
    BacktestConfig hungry = f.config;
    hungry.out_dir = out3.path();
    hungry.insample_days = 50;  // 50 + 5 > 40 days of data
    CHECK_THROWS_AS(run_backtest(hungry), DataError);
}

TEST_CASE("one failing model does not poison the others") {
    TempDir data("idtraj-bt-flat-data");
    TempDir out("idtraj-bt-flat-run");
    SynthConfig synth = SynthConfig::defaults();
    synth.logit_beta.setZero();
    synth.logit_beta[0] = -40.0;  // never trades: all differences zero
    synth.mu_beta.setZero();
    synth.sigma_beta.setZero();
    synth.pre_pi = 0.0;
    synth.n_days = 15;
    synth.hours = {12};
    synth.seed = 4;
    generate_synthetic(synth).save(data.path());

    BacktestConfig config;
    config.data_dir = data.path();
    config.insample_days = 10;
    config.oos_days = 3;
    config.members = 4;
    config.models = {ModelId::naive, ModelId::mv_normal};
    config.master_seed = 5;
    config.stride = 1;
    config.out_dir = out.path();

    const RunStats stats = run_backtest(config);
    CHECK(stats.computed == 3);  // Naive succeeds on all three days
    REQUIRE(stats.failures.size() == 3);
    for (const auto& [ref, message] : stats.failures) {
        CHECK(ref.model == "MV.N");
        CHECK(message.find("zero") != std::string::npos);
    }

    const CsvTable failures = read_csv(out.path() / "failures.csv");
    CHECK(failures.rows.size() == 3);
    const CsvTable summary = read_csv(out.path() / "scores" / "summary.csv");
    REQUIRE(summary.rows.size() == 2);
    const std::size_t n_col = summary.require_column("n_cells");
    CHECK(summary.rows[0][0] == "Naive");
    CHECK(summary.rows[0][n_col] == "3");
    CHECK(summary.rows[1][0] == "MV.N");
    CHECK(summary.rows[1][n_col] == "0");
    // A constant world is forecast perfectly by trajectory resampling.
    CHECK(summary.rows[0][summary.require_column("es")] == "0");
}

TEST_CASE("dependence experiment preserves marginal columns exactly") {
    const BtFixture& f = fixture();
    CHECK_THROWS_AS(run_copula_experiment(f.config.out_dir, "Nope"), ConfigError);
    CHECK_THROWS_AS(run_copula_experiment(f.config.out_dir, "MV.t"), DataError);

    run_copula_experiment(f.config.out_dir, "RW.N");
    const CsvTable table = read_csv(f.config.out_dir / "copula" / "table.csv");
    REQUIRE(table.rows.size() == 4);
    CHECK(table.rows[0][0] == "original");
    CHECK(table.rows[1][0] == "comonotone");
    CHECK(table.rows[2][0] == "countermonotone");
    CHECK(table.rows[3][0] == "independence");

    for (const char* col : {"n_cells", "crps", "mae", "rmse", "cov_50", "cov_90", "cov_99"}) {
        const std::size_t k = table.require_column(col);
        for (std::size_t r = 1; r < 4; ++r) {
            CHECK(table.rows[r][k] == table.rows[0][k]);
        }
    }
}

TEST_CASE("reports aggregate the panel") {
    const BtFixture& f = fixture();
    write_reports(f.config.out_dir);
    const CsvTable per_hour = read_csv(f.config.out_dir / "report" / "per_hour_es.csv");
    CHECK(per_hour.rows.size() == 4);  // 2 models x 2 hours
    const CsvTable coverage = read_csv(f.config.out_dir / "report" / "coverage.csv");
    CHECK(coverage.rows.size() == 6);  // 2 models x 3 levels
    const CsvTable per_step = read_csv(f.config.out_dir / "report" / "per_step_crps.csv");
    CHECK(per_step.rows.size() == 62);  // 2 models x 31 steps
    const CsvTable per_tau = read_csv(f.config.out_dir / "report" / "per_tau_pinball.csv");
    CHECK(per_tau.rows.size() == 198);  // 2 models x 99 quantile levels

    // The per-step view of the pinball detail averages back to the panel CRPS.
    const CsvTable summary = read_csv(f.config.out_dir / "scores" / "summary.csv");
    double crps_from_steps = 0.0;
    for (const auto& row : per_step.rows) {
        if (row[0] == "Naive") crps_from_steps += parse_double(row[per_step.require_column("crps")]);
    }
    crps_from_steps /= 31.0;
    const double crps_summary =
        parse_double(summary.rows[0][summary.require_column("crps")]);
    CHECK(std::abs(crps_from_steps - crps_summary) < 1e-12);
}

}  // TEST_SUITE
