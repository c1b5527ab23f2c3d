#include <fstream>

#include <json.hpp>

#include "idtraj/csv.hpp"
#include "idtraj/errors.hpp"
#include "idtraj/models.hpp"

namespace idtraj {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    j["data"] = data;
    return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw DataError("stored matrix has inconsistent dimensions");
    Eigen::MatrixXd m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
    const auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

json spline_term_to_json(const PSplineTerm& t) {
    json j;
    j["enabled"] = t.enabled;
    if (t.enabled) {
        j["lo"] = t.basis.lo();
        j["hi"] = t.basis.hi();
        j["n_basis"] = t.basis.size();
        j["degree"] = t.basis.degree();
        j["center"] = vector_to_json(t.center);
        j["coef"] = vector_to_json(t.coef);
        j["lambda"] = t.lambda;
        j["edf"] = t.edf;
    }
    return j;
}

PSplineTerm spline_term_from_json(const json& j) {
    PSplineTerm t;
    t.enabled = j.at("enabled").get<bool>();
    if (t.enabled) {
        t.basis = BSplineBasis(j.at("lo").get<double>(), j.at("hi").get<double>(),
                               j.at("n_basis").get<int>(), j.at("degree").get<int>());
        t.center = vector_from_json(j.at("center"));
        t.coef = vector_from_json(j.at("coef"));
        t.lambda = j.at("lambda").get<double>();
        t.edf = j.at("edf").get<double>();
    }
    return t;
}

json gamlss_to_json(const TGamlssFit& f) {
    json j;
    j["variant"] = static_cast<int>(f.variant);
    j["mu_beta"] = vector_to_json(f.mu_beta);
    j["sigma_beta"] = vector_to_json(f.sigma_beta);
    j["sigma_linear_active"] = f.sigma_linear_active;
    j["h_price"] = spline_term_to_json(f.h_price);
    j["h_step"] = spline_term_to_json(f.h_step);
    j["nu"] = f.nu;
    return j;
}

TGamlssFit gamlss_from_json(const json& j) {
    TGamlssFit f;
    f.variant = static_cast<GamlssVariant>(j.at("variant").get<int>());
    f.mu_beta = vector_from_json(j.at("mu_beta"));
    f.sigma_beta = vector_from_json(j.at("sigma_beta"));
    f.sigma_linear_active = j.at("sigma_linear_active").get<bool>();
    f.h_price = spline_term_from_json(j.at("h_price"));
    f.h_step = spline_term_from_json(j.at("h_step"));
    f.nu = j.at("nu").get<double>();
    return f;
}

json lasso_to_json(const LogitLassoFit& f) {
    json j;
    j["mean"] = vector_to_json(f.standardization.mean);
    j["scale"] = vector_to_json(f.standardization.scale);
    j["is_constant"] = f.standardization.is_constant;
    j["beta"] = vector_to_json(f.beta);
    j["lambda"] = f.lambda_path.empty() ? 0.0 : f.lambda_path[static_cast<std::size_t>(f.selected)];
    j["n_obs"] = f.n_obs;
    return j;
}

LogitLassoFit lasso_from_json(const json& j) {
    LogitLassoFit f;
    f.standardization.mean = vector_from_json(j.at("mean"));
    f.standardization.scale = vector_from_json(j.at("scale"));
    f.standardization.is_constant = j.at("is_constant").get<std::vector<std::uint8_t>>();
    f.beta = vector_from_json(j.at("beta"));
    f.lambda_path = {j.at("lambda").get<double>()};
    f.selected = 0;
    f.n_obs = j.at("n_obs").get<Eigen::Index>();
    return f;
}

json fit_to_json(const FittedModel& m) {
    json j;
    std::visit(
        [&](const auto& fit) {
            using T = std::decay_t<decltype(fit)>;
            if constexpr (std::is_same_v<T, NaiveFit>) {
                j["diff_paths"] = matrix_to_json(fit.diff_paths);
            } else if constexpr (std::is_same_v<T, RwFit>) {
                j["sigma"] = fit.sigma;
                j["nu"] = fit.nu;
                j["normal_limit"] = fit.normal_limit;
            } else if constexpr (std::is_same_v<T, RwMixFit>) {
                j["pi"] = fit.pi;
                j["sigma"] = fit.sigma;
                j["nu"] = fit.nu;
            } else if constexpr (std::is_same_v<T, MvModelFit>) {
                j["family"] = fit.mv.family == MvFamily::normal ? "normal" : "student_t";
                j["cov"] = matrix_to_json(fit.mv.cov);
                j["scatter"] = matrix_to_json(fit.mv.scatter);
                j["nu"] = fit.mv.nu;
                j["loglik"] = fit.mv.loglik;
                j["shrunk"] = fit.mv.shrunk;
                j["shrink_weight"] = fit.mv.shrink_weight;
            } else if constexpr (std::is_same_v<T, LqrModelFit>) {
                j["taus"] = fit.lqr.taus;
                json coef = json::array();
                for (const auto& per_tau : fit.lqr.coef) {
                    json inner = json::array();
                    for (const auto& beta : per_tau) inner.push_back(vector_to_json(beta));
                    coef.push_back(std::move(inner));
                }
                j["coef"] = std::move(coef);
                j["target_min"] = vector_to_json(fit.lqr.target_min);
                j["target_max"] = vector_to_json(fit.lqr.target_max);
                j["ridge_used"] = fit.lqr.ridge_used;
                j["correlation"] = matrix_to_json(fit.correlation);
                j["gaussian_dependence"] = fit.gaussian_dependence;
            } else {
                j["activity"] = lasso_to_json(fit.activity);
                j["innovation"] = gamlss_to_json(fit.innovation);
            }
        },
        m.fit);
    return j;
}

void fit_from_json(const json& j, FittedModel& m) {
    switch (m.id) {
        case ModelId::naive:
            m.fit = NaiveFit{matrix_from_json(j.at("diff_paths"))};
            break;
        case ModelId::rw_normal:
        case ModelId::rw_t:
            m.fit = RwFit{j.at("sigma").get<double>(), j.at("nu").get<double>(),
                          j.at("normal_limit").get<bool>()};
            break;
        case ModelId::rw_t_mix:
            m.fit = RwMixFit{j.at("pi").get<double>(), j.at("sigma").get<double>(),
                             j.at("nu").get<double>()};
            break;
        case ModelId::mv_normal:
        case ModelId::mv_t: {
            MvFit mv;
            mv.family = j.at("family").get<std::string>() == "normal" ? MvFamily::normal
                                                                      : MvFamily::student_t;
            mv.cov = matrix_from_json(j.at("cov"));
            mv.scatter = matrix_from_json(j.at("scatter"));
            mv.nu = j.at("nu").get<double>();
            mv.loglik = j.at("loglik").get<double>();
            mv.shrunk = j.at("shrunk").get<bool>();
            mv.shrink_weight = j.at("shrink_weight").get<double>();
            const Eigen::LLT<Eigen::MatrixXd> llt(mv.scatter);
            if (llt.info() != Eigen::Success)
                throw DataError("stored scatter matrix is not positive definite");
            mv.scatter_chol = llt.matrixL();
            m.fit = MvModelFit{std::move(mv)};
            break;
        }
        case ModelId::lqr_gauss:
        case ModelId::lqr_ind: {
            LqrModelFit f;
            f.lqr.taus = j.at("taus").get<std::vector<double>>();
            for (const auto& inner : j.at("coef")) {
                std::vector<Eigen::VectorXd> per_tau;
                for (const auto& beta : inner) per_tau.push_back(vector_from_json(beta));
                f.lqr.coef.push_back(std::move(per_tau));
            }
            f.lqr.target_min = vector_from_json(j.at("target_min"));
            f.lqr.target_max = vector_from_json(j.at("target_max"));
            f.lqr.ridge_used = j.at("ridge_used").get<bool>();
            f.correlation = matrix_from_json(j.at("correlation"));
            f.gaussian_dependence = j.at("gaussian_dependence").get<bool>();
            m.fit = std::move(f);
            break;
        }
        default:
            m.fit = MixFit{lasso_from_json(j.at("activity")), gamlss_from_json(j.at("innovation"))};
            break;
    }
}

json gridspec_to_json(const GridSpec& s) {
    json j;
    j["pre_origin_lags"] = s.pre_origin_lags;
    j["steps"] = s.steps;
    j["spacing_min"] = s.spacing_min;
    j["origin_min"] = s.origin_min;
    return j;
}

GridSpec gridspec_from_json(const json& j) {
    GridSpec s;
    s.pre_origin_lags = j.at("pre_origin_lags").get<int>();
    s.steps = j.at("steps").get<int>();
    s.spacing_min = j.at("spacing_min").get<int>();
    s.origin_min = j.at("origin_min").get<int>();
    return s;
}

}  // namespace

std::string fitted_model_to_json(const FittedModel& model) {
    json j;
    j["version"] = kSchemaVersion;
    j["model"] = model_name(model.id);
    j["grid"] = gridspec_to_json(model.spec);
    j["fit"] = fit_to_json(model);
    return j.dump();
}

FittedModel fitted_model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("stored model is not valid JSON: ") + e.what());
    }
    if (j.at("version").get<int>() != kSchemaVersion)
        throw DataError("unsupported stored model version");
    FittedModel m;
    m.id = model_from_name(j.at("model").get<std::string>());
    m.spec = gridspec_from_json(j.at("grid"));
    fit_from_json(j.at("fit"), m);
    return m;
}

void save_fitted_model(const std::filesystem::path& path, const FittedModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << fitted_model_to_json(model) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

FittedModel load_fitted_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fitted_model_from_json(text);
}

namespace {

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p += ".meta.json";
    return p;
}

json meta_to_json(const EnsembleMeta& meta, double origin_price) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = meta.model;
    j["day"] = format_date(meta.day);
    j["hour"] = meta.hour;
    j["seed"] = std::to_string(meta.seed);
    j["config_hash"] = std::to_string(meta.config_hash);
    j["origin_price"] = origin_price;
    return j;
}

EnsembleMeta meta_from_json(const json& j) {
    EnsembleMeta meta;
    meta.model = j.at("model").get<std::string>();
    meta.day = parse_date(j.at("day").get<std::string>());
    meta.hour = j.at("hour").get<int>();
    meta.seed = std::stoull(j.at("seed").get<std::string>());
    meta.config_hash = std::stoull(j.at("config_hash").get<std::string>());
    meta.origin_price = j.at("origin_price").get<double>();
    return meta;
}

}  // namespace

void save_ensemble(const std::filesystem::path& csv_path, const Ensemble& ensemble,
                   const EnsembleMeta& meta) {
    std::vector<std::string> header;
    header.reserve(static_cast<std::size_t>(ensemble.paths.cols()));
    for (Eigen::Index t = 1; t <= ensemble.paths.cols(); ++t)
        header.push_back("s" + std::to_string(t));
    CsvWriter writer(csv_path, header);
    std::vector<std::string> row(header.size());
    for (Eigen::Index m = 0; m < ensemble.paths.rows(); ++m) {
        for (Eigen::Index t = 0; t < ensemble.paths.cols(); ++t)
            row[static_cast<std::size_t>(t)] = format_double(ensemble.paths(m, t));
        writer.write_row(row);
    }
    writer.close();

    std::ofstream out(meta_path_for(csv_path), std::ios::binary);
    if (!out) throw DataError("cannot open ensemble meta file for writing");
    out << meta_to_json(meta, ensemble.origin_price).dump() << '\n';
    if (!out) throw DataError("failed writing ensemble meta file");
}

Ensemble load_ensemble(const std::filesystem::path& csv_path, EnsembleMeta* meta) {
    const CsvTable table = read_csv(csv_path);
    Ensemble e;
    const auto rows = static_cast<Eigen::Index>(table.rows.size());
    const auto cols = static_cast<Eigen::Index>(table.header.size());
    if (rows == 0 || cols == 0) throw DataError("empty ensemble file: " + csv_path.string());
    e.paths.resize(rows, cols);
    for (Eigen::Index m = 0; m < rows; ++m) {
        const auto& row = table.rows[static_cast<std::size_t>(m)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw DataError("ragged ensemble file: " + csv_path.string());
        for (Eigen::Index t = 0; t < cols; ++t)
            e.paths(m, t) = parse_double(row[static_cast<std::size_t>(t)]);
    }
    const auto loaded = try_load_ensemble_meta(csv_path);
    if (!loaded) throw DataError("missing ensemble meta file for " + csv_path.string());
    e.origin_price = loaded->origin_price;
    if (meta != nullptr) *meta = *loaded;
    return e;
}

std::optional<EnsembleMeta> try_load_ensemble_meta(const std::filesystem::path& csv_path) {
    const std::filesystem::path mp = meta_path_for(csv_path);
    std::ifstream in(mp, std::ios::binary);
    if (!in) return std::nullopt;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return meta_from_json(json::parse(text));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace idtraj
