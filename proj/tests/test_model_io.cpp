#include <doctest.h>

#include <string>

#include "idtraj/errors.hpp"
#include "idtraj/models.hpp"
#include "support/fsutil.hpp"
#include "support/world.hpp"

using namespace idtraj;
using idtraj::testing::TempDir;
using idtraj::testing::world;

TEST_SUITE("model-io") {

TEST_CASE("every fitted model survives a serialization round trip") {
    const auto& w = world();
    const OriginState origin = w.origin();
    for (const FittedModel& m : w.fits) {
        CAPTURE(model_name(m.id));
        const std::string text = fitted_model_to_json(m);
        const FittedModel back = fitted_model_from_json(text);
        CHECK(back.id == m.id);
        CHECK(back.spec.total() == m.spec.total());
        CHECK(back.spec.origin_min == m.spec.origin_min);

        // Identical seeds must reproduce identical trajectories through the
        // restored parameters.
        Rng ra(301);
        Rng rb(301);
        const Ensemble ea = simulate(m, origin, 8, ra);
        const Ensemble eb = simulate(back, origin, 8, rb);
        CHECK((ea.paths.array() == eb.paths.array()).all());
    }
}

TEST_CASE("model files round trip on disk") {
    const auto& w = world();
    TempDir dir("idtraj-model-io");
    const auto path = dir.path() / "model.json";
    const FittedModel& m = w.fit(ModelId::mix_t_mu_sigma);
    save_fitted_model(path, m);
    const FittedModel back = load_fitted_model(path);
    CHECK(fitted_model_to_json(back) == fitted_model_to_json(m));
    CHECK_THROWS_AS(load_fitted_model(dir.path() / "missing.json"), DataError);
}

TEST_CASE("corrupt or foreign model payloads are rejected") {
    const auto& w = world();
    const std::string text = fitted_model_to_json(w.fit(ModelId::rw_normal));

    CHECK_THROWS_AS(fitted_model_from_json("{not json"), DataError);

    std::string bad_version = text;
    const auto vpos = bad_version.find("\"version\":1");
    REQUIRE(vpos != std::string::npos);
    bad_version.replace(vpos, 11, "\"version\":2");
    CHECK_THROWS_AS(fitted_model_from_json(bad_version), DataError);

    std::string bad_model = text;
    const auto mpos = bad_model.find("\"RW.N\"");
    REQUIRE(mpos != std::string::npos);
    bad_model.replace(mpos, 6, "\"RW.X\"");
    CHECK_THROWS_AS(fitted_model_from_json(bad_model), ConfigError);
}

TEST_CASE("ensemble files round trip with their metadata") {
    TempDir dir("idtraj-ensemble-io");
    Ensemble e;
    e.origin_price = 41.25;
    e.paths.resize(3, 4);
    e.paths << 1.0, 2.5, -0.125, 7.0,
        41.3333333333333357, 0.1, 2e-13, 1e6,
        0.0, -5.5, 3.25, 9.75;
    EnsembleMeta meta;
    meta.model = "RW.t";
    meta.day = make_date(2025, 6, 1);
    meta.hour = 17;
    meta.seed = 12345678901234567ull;
    meta.config_hash = 9876543210987654321ull;
    meta.origin_price = e.origin_price;

    const auto csv = dir.path() / "2025-06-01_17.csv";
    save_ensemble(csv, e, meta);

    EnsembleMeta got;
    const Ensemble back = load_ensemble(csv, &got);
    CHECK((back.paths.array() == e.paths.array()).all());
    CHECK(back.origin_price == e.origin_price);
    CHECK(got.model == meta.model);
    CHECK(got.day == meta.day);
    CHECK(got.hour == meta.hour);
    CHECK(got.seed == meta.seed);
    CHECK(got.config_hash == meta.config_hash);
    CHECK(got.origin_price == meta.origin_price);

    const auto sidecar = try_load_ensemble_meta(csv);
    REQUIRE(sidecar.has_value());
    CHECK(sidecar->seed == meta.seed);
    CHECK(!try_load_ensemble_meta(dir.path() / "other.csv").has_value());
}

TEST_CASE("ensemble loading requires the sidecar") {
    TempDir dir("idtraj-ensemble-meta");
    Ensemble e;
    e.origin_price = 1.0;
    e.paths = Eigen::MatrixXd::Ones(2, 2);
    EnsembleMeta meta;
    meta.model = "Naive";
    meta.day = make_date(2025, 1, 1);

    const auto csv = dir.path() / "x.csv";
    save_ensemble(csv, e, meta);
    std::filesystem::remove(dir.path() / "x.csv.meta.json");
    CHECK_THROWS_AS(load_ensemble(csv), DataError);
    CHECK_THROWS_AS(load_ensemble(dir.path() / "absent.csv"), DataError);
}

}  // TEST_SUITE
