#include <benchmark/benchmark.h>

#include <vector>

#include <Eigen/Dense>

#include "idtraj/designmatrix.hpp"
#include "idtraj/logit_lasso.hpp"
#include "idtraj/models.hpp"
#include "idtraj/rng.hpp"
#include "idtraj/scoring.hpp"
#include "idtraj/synthetic.hpp"
#include "idtraj/tdist.hpp"

using namespace idtraj;

namespace {

const Dataset& bench_dataset() {
    static const Dataset ds = [] {
        SynthConfig config = SynthConfig::defaults();
        config.n_days = 30;
        config.hours = {12};
        config.seed = 97;
        return generate_synthetic(config);
    }();
    return ds;
}

std::vector<ProductData> bench_window() {
    const Dataset& ds = bench_dataset();
    std::vector<ProductData> window;
    for (const Date day : ds.days()) {
        window.push_back({&ds.grid(day, 12), ds.fundamental(day, 12)});
    }
    return window;
}

// The full mixture model at the generator's own coefficients; built by hand
// so the benchmark isolates simulation from estimation.
FittedModel truth_mixture() {
    const SynthConfig config = SynthConfig::defaults();
    LogitLassoFit activity;
    const Eigen::Index p = config.logit_beta.size();
    activity.standardization.mean = Eigen::VectorXd::Zero(p);
    activity.standardization.scale = Eigen::VectorXd::Ones(p);
    activity.standardization.is_constant.assign(static_cast<std::size_t>(p), 0);
    activity.beta = config.logit_beta;
    activity.beta_path = config.logit_beta;
    activity.lambda_path = {0.0};
    activity.bic_path = {0.0};
    activity.n_obs = 1;

    TGamlssFit innovation;
    innovation.variant = GamlssVariant::mu_and_sigma;
    innovation.mu_beta = config.mu_beta;
    innovation.sigma_beta = config.sigma_beta;
    innovation.sigma_linear_active = true;
    innovation.nu = config.nu;

    FittedModel model;
    model.id = ModelId::mix_t_mu_sigma;
    model.spec = config.spec;
    model.fit = MixFit{activity, innovation};
    return model;
}

void bm_score_cell(benchmark::State& state) {
    const int members = static_cast<int>(state.range(0));
    Rng rng(11);
    Eigen::MatrixXd ens(members, 31);
    Eigen::VectorXd obs(31);
    for (int m = 0; m < members; ++m) {
        double level = 40.0;
        for (int t = 0; t < 31; ++t) {
            level += normal_quantile(rng.uniform());
            ens(m, t) = level;
        }
    }
    double level = 40.0;
    for (int t = 0; t < 31; ++t) {
        level += normal_quantile(rng.uniform());
        obs[t] = level;
    }
    const std::vector<double>& taus = scoring_tau_grid();
    for (auto _ : state) {
        const CellScores s = score_cell(obs, ens, taus);
        benchmark::DoNotOptimize(s.es);
    }
}
BENCHMARK(bm_score_cell)->Arg(50)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void bm_logit_lasso_path(benchmark::State& state) {
    const LogitPanel panel = build_logit_panel(bench_window(), bench_dataset().spec);
    for (auto _ : state) {
        const LogitLassoFit fit = fit_logit_lasso(panel.x, panel.y);
        benchmark::DoNotOptimize(fit.selected);
    }
}
BENCHMARK(bm_logit_lasso_path)->Unit(benchmark::kMillisecond);

void bm_mixture_simulate(benchmark::State& state) {
    const int members = static_cast<int>(state.range(0));
    const FittedModel model = truth_mixture();
    const Dataset& ds = bench_dataset();
    const Date day = ds.days().back();
    const OriginState origin =
        make_origin_state(ds.grid(day, 12), ds.fundamental(day, 12), weekday(day));
    for (auto _ : state) {
        Rng rng(7);
        const Ensemble e = simulate(model, origin, members, rng);
        benchmark::DoNotOptimize(e.paths.data());
    }
}
BENCHMARK(bm_mixture_simulate)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
