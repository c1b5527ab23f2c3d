#include "idtraj/models.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "idtraj/copula.hpp"
#include "idtraj/errors.hpp"
#include "idtraj/monotone.hpp"
#include "idtraj/tdist.hpp"

namespace idtraj {

namespace {

constexpr double kNormalLimitNu = 1e6;
constexpr double kPiClamp = 1e-6;

struct NameEntry {
    ModelId id;
    const char* name;
};

constexpr NameEntry kNames[] = {
    {ModelId::naive, "Naive"},
    {ModelId::mv_normal, "MV.N"},
    {ModelId::mv_t, "MV.t"},
    {ModelId::rw_normal, "RW.N"},
    {ModelId::rw_t, "RW.t"},
    {ModelId::rw_t_mix, "RW.t.mix.D"},
    {ModelId::lqr_gauss, "LQR.Gauss"},
    {ModelId::lqr_ind, "LQR.ind"},
    {ModelId::mix_rw_t, "Mix.RW.t"},
    {ModelId::mix_t_mu, "Mix.t.mu"},
    {ModelId::mix_t_sigma, "Mix.t.sigma"},
    {ModelId::mix_t_mu_sigma, "Mix.t.mu.sigma"},
};

}  // namespace

const std::vector<ModelId>& all_models() {
    static const std::vector<ModelId> ids = [] {
        std::vector<ModelId> v;
        for (const auto& e : kNames) v.push_back(e.id);
        return v;
    }();
    return ids;
}

std::string model_name(ModelId id) {
    for (const auto& e : kNames) {
        if (e.id == id) return e.name;
    }
    throw ContractError("unknown model id");
}

ModelId model_from_name(const std::string& name) {
    for (const auto& e : kNames) {
        if (name == e.name) return e.id;
    }
    throw ConfigError("unknown model name: " + name);
}

std::vector<ModelId> parse_model_list(const std::string& csv) {
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        if (b == std::string::npos) return std::string();
        return s.substr(b, e - b + 1);
    };
    if (trim(csv) == "all") return all_models();
    std::vector<ModelId> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const ModelId id = model_from_name(item);
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    if (out.empty()) throw ConfigError("empty model list");
    return out;
}

namespace {

// Sub-fits that several model variants reuse on the same window, each
// computed at most once.
struct SharedFits {
    const std::vector<ProductData>& window;
    const GridSpec& spec;
    GamlssOptions gopt;

    std::optional<Eigen::MatrixXd> diffs;
    std::optional<GamlssPanel> panel;
    std::optional<LogitLassoFit> activity;
    std::optional<TGamlssFit> innovations[4];   // indexed by GamlssVariant
    std::optional<TGamlssFit> all_diff_t;       // scale/tail on all differences
    std::optional<TGamlssFit> all_diff_normal;  // same with the tail pinned
    std::optional<LqrFit> lqr;
    std::optional<Eigen::MatrixXd> lqr_corr;

    const Eigen::MatrixXd& diff_matrix() {
        if (!diffs) diffs = build_diff_matrix(window, spec);
        return *diffs;
    }

    const GamlssPanel& gamlss_panel() {
        if (!panel) panel = build_gamlss_panel(window, spec);
        return *panel;
    }

    GamlssData traded_subset() {
        const GamlssPanel& p = gamlss_panel();
        const Eigen::Index n = (p.alpha.array() > 0.5).count();
        GamlssData d;
        d.mu_x.resize(n, p.mu_x.cols());
        d.sigma_x.resize(n, p.sigma_x.cols());
        d.prev_price.resize(n);
        d.step.resize(n);
        d.y.resize(n);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < p.alpha.size(); ++i) {
            if (p.alpha[i] <= 0.5) continue;
            d.mu_x.row(r) = p.mu_x.row(i);
            d.sigma_x.row(r) = p.sigma_x.row(i);
            d.prev_price[r] = p.prev_price[i];
            d.step[r] = p.step[i];
            d.y[r] = p.diff[i];
            ++r;
        }
        return d;
    }

    GamlssData full_data() {
        const GamlssPanel& p = gamlss_panel();
        return GamlssData{p.mu_x, p.sigma_x, p.prev_price, p.step, p.diff};
    }

    double trade_share() {
        const GamlssPanel& p = gamlss_panel();
        return p.alpha.mean();
    }

    const LogitLassoFit& activity_fit() {
        if (!activity) {
            const LogitPanel lp = build_logit_panel(window, spec);
            activity = fit_logit_lasso(lp.x, lp.y);
        }
        return *activity;
    }

    const TGamlssFit& innovation_fit(GamlssVariant variant) {
        auto& slot = innovations[static_cast<int>(variant)];
        if (!slot) slot = fit_t_gamlss(traded_subset(), variant, gopt);
        return *slot;
    }

    const TGamlssFit& all_diff_fit(bool normal_limit) {
        auto& slot = normal_limit ? all_diff_normal : all_diff_t;
        if (!slot) {
            GamlssOptions opt = gopt;
            if (normal_limit) opt.fix_nu = kNormalLimitNu;
            slot = fit_t_gamlss(full_data(), GamlssVariant::const_sigma, opt);
        }
        return *slot;
    }

    const LqrFit& lqr_fit() {
        if (!lqr) {
            const LqrPanel lp = build_lqr_panel(window, spec);
            lqr = fit_lqr(lp.x, lp.targets);
        }
        return *lqr;
    }

    const Eigen::MatrixXd& target_correlation() {
        if (!lqr_corr) {
            const LqrPanel lp = build_lqr_panel(window, spec);
            const Eigen::Index t = lp.targets.cols();
            const Eigen::MatrixXd centered =
                lp.targets.rowwise() - lp.targets.colwise().mean();
            const Eigen::MatrixXd cov =
                centered.transpose() * centered / static_cast<double>(lp.targets.rows() - 1);
            Eigen::VectorXd sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
            Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(t, t);
            for (Eigen::Index i = 0; i < t; ++i) {
                for (Eigen::Index j = 0; j < t; ++j) {
                    if (i == j) continue;
                    const double denom = sd[i] * sd[j];
                    corr(i, j) = denom > 1e-12 ? cov(i, j) / denom : 0.0;
                }
            }
            lqr_corr = corr;
        }
        return *lqr_corr;
    }
};

FittedModel assemble(ModelId id, SharedFits& shared) {
    FittedModel m;
    m.id = id;
    m.spec = shared.spec;
    switch (id) {
        case ModelId::naive:
            m.fit = NaiveFit{shared.diff_matrix()};
            break;
        case ModelId::mv_normal:
            m.fit = MvModelFit{fit_mv(shared.diff_matrix(), MvFamily::normal)};
            break;
        case ModelId::mv_t:
            m.fit = MvModelFit{fit_mv(shared.diff_matrix(), MvFamily::student_t)};
            break;
        case ModelId::rw_normal: {
            const TGamlssFit& f = shared.all_diff_fit(true);
            m.fit = RwFit{f.constant_sigma(), kNormalLimitNu, true};
            break;
        }
        case ModelId::rw_t: {
            const TGamlssFit& f = shared.all_diff_fit(false);
            m.fit = RwFit{f.constant_sigma(), f.nu, false};
            break;
        }
        case ModelId::rw_t_mix: {
            const TGamlssFit& f = shared.innovation_fit(GamlssVariant::const_sigma);
            m.fit = RwMixFit{shared.trade_share(), f.constant_sigma(), f.nu};
            break;
        }
        case ModelId::lqr_gauss:
            m.fit = LqrModelFit{shared.lqr_fit(), shared.target_correlation(), true};
            break;
        case ModelId::lqr_ind:
            m.fit = LqrModelFit{shared.lqr_fit(), Eigen::MatrixXd(), false};
            break;
        case ModelId::mix_rw_t:
            m.fit = MixFit{shared.activity_fit(),
                           shared.innovation_fit(GamlssVariant::const_sigma)};
            break;
        case ModelId::mix_t_mu:
            m.fit = MixFit{shared.activity_fit(), shared.innovation_fit(GamlssVariant::mu_only)};
            break;
        case ModelId::mix_t_sigma:
            m.fit =
                MixFit{shared.activity_fit(), shared.innovation_fit(GamlssVariant::sigma_only)};
            break;
        case ModelId::mix_t_mu_sigma:
            m.fit = MixFit{shared.activity_fit(),
                           shared.innovation_fit(GamlssVariant::mu_and_sigma)};
            break;
    }
    return m;
}

}  // namespace

std::vector<FittedModel> fit_models(const std::vector<ModelId>& ids,
                                    const std::vector<ProductData>& window, const GridSpec& spec,
                                    const GamlssOptions& gamlss_options) {
    if (window.empty()) throw EstimationError("empty in-sample window");
    for (const auto& pd : window) {
        if (pd.grid == nullptr) throw ContractError("window entry without a grid");
        if (static_cast<int>(pd.grid->prices.size()) != spec.total())
            throw ContractError("window grid size does not match the grid layout");
    }
    SharedFits shared{window, spec, gamlss_options, {}, {}, {}, {}, {}, {}, {}, {}};
    std::vector<FittedModel> out;
    out.reserve(ids.size());
    for (ModelId id : ids) out.push_back(assemble(id, shared));
    return out;
}

FittedModel fit_model(ModelId id, const std::vector<ProductData>& window, const GridSpec& spec,
                      const GamlssOptions& gamlss_options) {
    return fit_models({id}, window, spec, gamlss_options).front();
}

OriginState make_origin_state(const PriceGrid& grid, const FundamentalRow& fund, int wday) {
    OriginState s;
    s.lags = lag_state_at(grid, 1);
    s.origin_price = grid.origin_price();
    s.wday = wday;
    s.fundamental = fund;
    return s;
}

double empirical_trade_share(const std::vector<ProductData>& window, const GridSpec& spec) {
    return build_gamlss_panel(window, spec).alpha.mean();
}

namespace {

void simulate_naive(const NaiveFit& fit, double p0, Eigen::MatrixXd& paths, Rng& rng) {
    const Eigen::Index n = fit.diff_paths.rows();
    if (n == 0) throw EstimationError("no stored trajectories to resample");
    for (Eigen::Index m = 0; m < paths.rows(); ++m) {
        const auto idx = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        double level = p0;
        for (Eigen::Index t = 0; t < paths.cols(); ++t) {
            level += fit.diff_paths(idx, t);
            paths(m, t) = level;
        }
    }
}

void simulate_rw(const RwFit& fit, double p0, Eigen::MatrixXd& paths, Rng& rng) {
    for (Eigen::Index m = 0; m < paths.rows(); ++m) {
        double level = p0;
        for (Eigen::Index t = 0; t < paths.cols(); ++t) {
            const double u = rng.uniform();
            level += fit.normal_limit ? fit.sigma * normal_quantile(u)
                                      : t3_quantile(u, 0.0, fit.sigma, fit.nu);
            paths(m, t) = level;
        }
    }
}

void simulate_rw_mix(const RwMixFit& fit, double p0, Eigen::MatrixXd& paths, Rng& rng) {
    const ZeroInflatedT dist{fit.pi, 0.0, fit.sigma, fit.nu};
    for (Eigen::Index m = 0; m < paths.rows(); ++m) {
        double level = p0;
        for (Eigen::Index t = 0; t < paths.cols(); ++t) {
            level += zit_sample(rng, dist);
            paths(m, t) = level;
        }
    }
}

void simulate_mv(const MvModelFit& fit, double p0, Eigen::MatrixXd& paths, Rng& rng) {
    const Eigen::MatrixXd& l = fit.mv.scatter_chol;
    const Eigen::Index t_steps = paths.cols();
    if (l.rows() != t_steps) throw ContractError("covariance size does not match steps");
    Eigen::VectorXd z(t_steps);
    for (Eigen::Index m = 0; m < paths.rows(); ++m) {
        for (Eigen::Index t = 0; t < t_steps; ++t) z[t] = normal_quantile(rng.uniform());
        double scale = 1.0;
        if (fit.mv.family == MvFamily::student_t) {
            const double w = chi_squared_quantile(rng.uniform(), fit.mv.nu) / fit.mv.nu;
            scale = 1.0 / std::sqrt(w);
        }
        const Eigen::VectorXd eps = l * z * scale;
        double level = p0;
        for (Eigen::Index t = 0; t < t_steps; ++t) {
            level += eps[t];
            paths(m, t) = level;
        }
    }
}

void simulate_lqr(const LqrModelFit& fit, const OriginState& origin, Eigen::MatrixXd& paths,
                  Rng& rng) {
    const Eigen::Index t_steps = paths.cols();
    const Eigen::VectorXd row =
        lqr_row(origin.lags, origin.origin_price, origin.wday, origin.fundamental);
    std::vector<MonotoneCdf> cdfs;
    cdfs.reserve(static_cast<std::size_t>(t_steps));
    for (Eigen::Index t = 0; t < t_steps; ++t)
        cdfs.push_back(build_marginal_cdf(fit.lqr, row, static_cast<int>(t)));

    Eigen::MatrixXd u(paths.rows(), t_steps);
    for (Eigen::Index m = 0; m < u.rows(); ++m)
        for (Eigen::Index t = 0; t < t_steps; ++t) u(m, t) = rng.uniform();
    if (fit.gaussian_dependence) {
        CopulaSpec spec;
        spec.kind = CopulaKind::gaussian;
        spec.correlation = fit.correlation;
        u = copula_transform(u, spec);
    }
    for (Eigen::Index m = 0; m < paths.rows(); ++m) {
        for (Eigen::Index t = 0; t < t_steps; ++t) {
            paths(m, t) = origin.origin_price +
                          cdfs[static_cast<std::size_t>(t)].quantile(u(m, t));
        }
    }
}

void simulate_mix(const MixFit& fit, const GridSpec& spec, const OriginState& origin,
                  Eigen::MatrixXd& paths, Rng& rng) {
    const int t_steps = spec.steps;
    for (Eigen::Index m = 0; m < paths.rows(); ++m) {
        LagState state = origin.lags;
        double level = origin.origin_price;
        for (int t = 1; t <= t_steps; ++t) {
            const Eigen::VectorXd arow =
                logit_row(state, origin.wday, t, origin.fundamental, t_steps);
            const double pi =
                std::clamp(predict_pi(fit.activity, arow), kPiClamp, 1.0 - kPiClamp);
            const double u_branch = rng.uniform();
            const double u_value = rng.uniform();
            double diff = 0.0;
            double alpha = 0.0;
            if (u_branch < pi) {
                alpha = 1.0;
                const double mu = fit.innovation.predict_mu(mu_row(state));
                const double sigma = fit.innovation.predict_sigma(
                    sigma_row(state, origin.wday, origin.fundamental), state.prev_price,
                    static_cast<double>(t));
                diff = t3_quantile(u_value, mu, sigma, fit.innovation.nu);
            }
            level += diff;
            state.push(diff, alpha, level);
            paths(m, t - 1) = level;
        }
    }
}

}  // namespace

Ensemble simulate(const FittedModel& model, const OriginState& origin, int members, Rng& rng) {
    if (members < 1) throw ContractError("ensemble needs at least one member");
    Ensemble e;
    e.origin_price = origin.origin_price;
    e.paths.resize(members, model.spec.steps);

    std::visit(
        [&](const auto& fit) {
            using T = std::decay_t<decltype(fit)>;
            if constexpr (std::is_same_v<T, NaiveFit>) {
                simulate_naive(fit, origin.origin_price, e.paths, rng);
            } else if constexpr (std::is_same_v<T, RwFit>) {
                simulate_rw(fit, origin.origin_price, e.paths, rng);
            } else if constexpr (std::is_same_v<T, RwMixFit>) {
                simulate_rw_mix(fit, origin.origin_price, e.paths, rng);
            } else if constexpr (std::is_same_v<T, MvModelFit>) {
                simulate_mv(fit, origin.origin_price, e.paths, rng);
            } else if constexpr (std::is_same_v<T, LqrModelFit>) {
                simulate_lqr(fit, origin, e.paths, rng);
            } else {
                simulate_mix(fit, model.spec, origin, e.paths, rng);
            }
        },
        model.fit);

    if (!e.paths.allFinite()) throw EstimationError("simulation produced non-finite prices");
    return e;
}

}  // namespace idtraj
