#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "idtraj/backtest.hpp"
#include "idtraj/csv.hpp"
#include "idtraj/errors.hpp"
#include "idtraj/marketdata.hpp"
#include "idtraj/models.hpp"
#include "idtraj/synthetic.hpp"

namespace {

using namespace idtraj;

struct Args {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string models;
    int jobs = 0;
    int stride = 0;
    std::string loss = "es";

    // synth
    int days = 140;
    std::string hours = "9,17";
    bool raw = false;

    // ingest
    std::string trades;
    std::string fundamentals;
    std::string da;
};

std::vector<int> parse_hours(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_long(item)));
    }
    if (out.empty()) throw ConfigError("empty hour list");
    return out;
}

int cmd_synth(const Args& args) {
    SynthConfig config = SynthConfig::defaults();
    config.n_days = args.days;
    config.hours = parse_hours(args.hours);
    if (args.seed_set) config.seed = args.seed;

    const Dataset ds = generate_synthetic(config);
    ds.save(args.out);
    write_truth_json(std::filesystem::path(args.out) / "truth.json", config);
    if (args.raw) {
        write_synthetic_raw(std::filesystem::path(args.out) / "raw", ds, config.seed);
    }
    std::cout << "wrote " << ds.grids.size() << " products to " << args.out << "\n";
    return 0;
}

int cmd_ingest(const Args& args) {
    std::vector<std::string> warnings;
    const Dataset ds = ingest_raw(args.trades, args.fundamentals, args.da, GridSpec{}, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    ds.save(args.out);
    std::cout << "wrote " << ds.grids.size() << " products to " << args.out << "\n";
    return 0;
}

BacktestConfig load_backtest_config(const Args& args) {
    if (args.config.empty()) throw ConfigError("--config is required");
    BacktestConfig config = BacktestConfig::from_json_file(args.config);
    if (args.seed_set) config.master_seed = args.seed;
    if (!args.models.empty()) config.models = parse_model_list(args.models);
    if (args.stride > 0) config.stride = args.stride;
    if (args.jobs > 0) config.jobs = args.jobs;
    config.out_dir = args.out;
    return config;
}

int cmd_backtest(const Args& args) {
    const BacktestConfig config = load_backtest_config(args);
    const RunStats stats = run_backtest(config);
    std::cout << "computed " << stats.computed << " cells, reused " << stats.reused
              << ", failures " << stats.failures.size() << "\n";
    return 0;
}

int cmd_evaluate(const Args& args) {
    evaluate_run(args.out);
    std::cout << "scores written under " << args.out << "\n";
    return 0;
}

int cmd_dm(const Args& args) {
    if (args.loss != "es" && args.loss != "crps") {
        throw ConfigError("--loss must be 'es' or 'crps'");
    }
    const std::filesystem::path table =
        std::filesystem::path(args.out) / "dm" / (args.loss + "_pvalues.csv");
    if (!std::filesystem::exists(table)) evaluate_run(args.out);
    std::ifstream in(table, std::ios::binary);
    if (!in) throw DataError("cannot open " + table.string());
    std::cout << in.rdbuf();
    return 0;
}

int cmd_copula(const Args& args) {
    const std::string base = args.models.empty() ? "Mix.t.mu.sigma" : args.models;
    run_copula_experiment(args.out, base);
    std::cout << "dependence table written under " << args.out << "\n";
    return 0;
}

int cmd_report(const Args& args) {
    const std::filesystem::path panel =
        std::filesystem::path(args.out) / "scores" / "panel.csv";
    if (!std::filesystem::exists(panel)) evaluate_run(args.out);
    write_reports(args.out);
    std::cout << "reports written under " << args.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Args args;
    CLI::App app{"Probabilistic intraday electricity price trajectory forecasting"};
    app.require_subcommand(1);

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--out", args.out, "Dataset output directory")->required();
    synth->add_option("--days", args.days, "Number of delivery days");
    synth->add_option("--hours", args.hours, "Comma-separated delivery hours");
    synth->add_option("--seed", args.seed, "Generator seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    synth->add_flag("--raw", args.raw, "Also export raw trade/fundamental files");

    CLI::App* ingest = app.add_subcommand("ingest", "Build a dataset from raw files");
    ingest->add_option("--trades", args.trades, "Trade records CSV")->required();
    ingest->add_option("--fundamentals", args.fundamentals, "Fundamentals CSV")->required();
    ingest->add_option("--da", args.da, "Day-ahead price CSV")->required();
    ingest->add_option("--out", args.out, "Dataset output directory")->required();

    CLI::App* backtest = app.add_subcommand("backtest", "Run a rolling-origin study");
    backtest->add_option("--config", args.config, "Study configuration JSON")->required();
    backtest->add_option("--out", args.out, "Run directory")->required();
    backtest->add_option("--seed", args.seed, "Master seed override")
        ->each([&](const std::string&) { args.seed_set = true; });
    backtest->add_option("--models", args.models, "Comma-separated model names, or 'all'");
    backtest->add_option("--jobs", args.jobs, "Worker threads");
    backtest->add_option("--stride", args.stride, "Refit cadence in days");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Rescore a run directory");
    evaluate->add_option("--out", args.out, "Run directory")->required();

    CLI::App* dm = app.add_subcommand("dm", "Print a pairwise comparison table");
    dm->add_option("--out", args.out, "Run directory")->required();
    dm->add_option("--loss", args.loss, "Loss column: es or crps");

    CLI::App* copula = app.add_subcommand("copula", "Rescore under imposed dependence");
    copula->add_option("--out", args.out, "Run directory")->required();
    copula->add_option("--models", args.models, "Base model name");

    CLI::App* report = app.add_subcommand("report", "Write aggregated report tables");
    report->add_option("--out", args.out, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(args);
        if (ingest->parsed()) return cmd_ingest(args);
        if (backtest->parsed()) return cmd_backtest(args);
        if (evaluate->parsed()) return cmd_evaluate(args);
        if (dm->parsed()) return cmd_dm(args);
        if (copula->parsed()) return cmd_copula(args);
        if (report->parsed()) return cmd_report(args);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
