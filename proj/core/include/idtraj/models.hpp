#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "idtraj/calendar.hpp"
#include "idtraj/designmatrix.hpp"
#include "idtraj/logit_lasso.hpp"
#include "idtraj/marketdata.hpp"
#include "idtraj/mv_fit.hpp"
#include "idtraj/quantile_reg.hpp"
#include "idtraj/rng.hpp"
#include "idtraj/tgamlss.hpp"

namespace idtraj {

enum class ModelId {
    naive,
    mv_normal,
    mv_t,
    rw_normal,
    rw_t,
    rw_t_mix,
    lqr_gauss,
    lqr_ind,
    mix_rw_t,
    mix_t_mu,
    mix_t_sigma,
    mix_t_mu_sigma,
};

inline constexpr int kNumModels = 12;

const std::vector<ModelId>& all_models();
std::string model_name(ModelId id);
ModelId model_from_name(const std::string& name);
// Comma-separated names, or "all".
std::vector<ModelId> parse_model_list(const std::string& csv);

// Resamples whole in-sample difference trajectories.
struct NaiveFit {
    Eigen::MatrixXd diff_paths;  // days x steps
};

// Independent per-step innovations with a common scale.
struct RwFit {
    double sigma = 1.0;
    double nu = 5.0;
    bool normal_limit = false;
};

// Same, zero-inflated: a no-trade step contributes a zero difference.
struct RwMixFit {
    double pi = 0.5;
    double sigma = 1.0;
    double nu = 5.0;
};

struct MvModelFit {
    MvFit mv;
};

// Per-horizon quantile curves plus the dependence used to couple horizons.
struct LqrModelFit {
    LqrFit lqr;
    Eigen::MatrixXd correlation;  // of origin-to-horizon differences
    bool gaussian_dependence = false;
};

// Trade-activity probability model plus the conditional innovation model,
// simulated recursively step by step.
struct MixFit {
    LogitLassoFit activity;
    TGamlssFit innovation;
};

struct FittedModel {
    ModelId id = ModelId::naive;
    GridSpec spec;
    std::variant<NaiveFit, RwFit, RwMixFit, MvModelFit, LqrModelFit, MixFit> fit;
};

// Fits a batch of models on one in-sample window, computing shared pieces
// (activity model, innovation models, quantile curves) only once.
std::vector<FittedModel> fit_models(const std::vector<ModelId>& ids,
                                    const std::vector<ProductData>& window, const GridSpec& spec,
                                    const GamlssOptions& gamlss_options = {});
FittedModel fit_model(ModelId id, const std::vector<ProductData>& window, const GridSpec& spec,
                      const GamlssOptions& gamlss_options = {});

// Conditioning information available at the forecast origin of one product.
struct OriginState {
    LagState lags;
    double origin_price = 0.0;
    int wday = 0;
    FundamentalRow fundamental;
};

OriginState make_origin_state(const PriceGrid& grid, const FundamentalRow& fund, int wday);

// Share of traded post-origin windows across the estimation window; the trade
// probability used by the fixed-share mixture model.
double empirical_trade_share(const std::vector<ProductData>& window, const GridSpec& spec);

struct Ensemble {
    double origin_price = 0.0;
    Eigen::MatrixXd paths;  // members x steps, price levels
};

Ensemble simulate(const FittedModel& model, const OriginState& origin, int members, Rng& rng);

// --- persistence ---

std::string fitted_model_to_json(const FittedModel& model);
FittedModel fitted_model_from_json(const std::string& text);
void save_fitted_model(const std::filesystem::path& path, const FittedModel& model);
FittedModel load_fitted_model(const std::filesystem::path& path);

struct EnsembleMeta {
    std::string model;
    Date day{};
    int hour = 0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    double origin_price = 0.0;
};

// CSV of members x steps plus a JSON sidecar (<path>.meta.json).
void save_ensemble(const std::filesystem::path& csv_path, const Ensemble& ensemble,
                   const EnsembleMeta& meta);
Ensemble load_ensemble(const std::filesystem::path& csv_path, EnsembleMeta* meta = nullptr);
std::optional<EnsembleMeta> try_load_ensemble_meta(const std::filesystem::path& csv_path);

}  // namespace idtraj
