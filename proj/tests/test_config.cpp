#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "loadcast/config.hpp"

using namespace loadcast;

TEST_CASE("empty or blank text reproduces the full defaults") {
    for (const char* text : {"", "   \n\t ", "{}"}) {
        const AppConfig app = parse_config_text(text);
        CHECK(app.data_csv.empty());
        CHECK(app.synthetic_days == 183);
        CHECK(app.synthetic_seed == 1);
        CHECK(app.out_dir == "bench_out");
        CHECK(app.bench.models.size() == 3);
        CHECK(app.bench.terms.size() == 3);
        CHECK(app.bench.runs == 10);
        CHECK(app.bench.horizon == 1);
        CHECK(app.bench.seed == 1);
        CHECK(app.bench.vstelf.train_len == 60);
        CHECK(app.bench.stelf.test_len == 3000);
        CHECK(app.bench.mtelf.sampling_minutes == 10);
    }
}

TEST_CASE("top-level keys land in the right fields") {
    const AppConfig app = parse_config_text(R"({
        "data": "house.csv",
        "synthetic_days": 7,
        "synthetic_seed": 99,
        "seed": 13,
        "runs": 4,
        "horizon": 2,
        "out": "results",
        "models": ["svr", "brnn"],
        "terms": ["mtelf"]
    })");
    CHECK(app.data_csv == "house.csv");
    CHECK(app.synthetic_days == 7);
    CHECK(app.synthetic_seed == 99);
    CHECK(app.bench.seed == 13);
    CHECK(app.bench.runs == 4);
    CHECK(app.bench.horizon == 2);
    CHECK(app.out_dir == "results");
    REQUIRE(app.bench.models.size() == 2);
    CHECK(app.bench.models[0] == ModelKind::svr);
    CHECK(app.bench.models[1] == ModelKind::brnn);
    REQUIRE(app.bench.terms.size() == 1);
    CHECK(app.bench.terms[0] == Term::MTELF);
}

TEST_CASE("nested hyperparameter sections override the defaults") {
    const AppConfig app = parse_config_text(R"({
        "svr": {"c": 8.0, "epsilon": 0.01, "tol": 1e-4, "max_iter": 5000, "cache_mb": 16},
        "kernel": {"type": "anova_rbf", "sigma": 2.5, "degree": 3},
        "sbc": {"radius": 0.3, "squash": 1.2, "accept_ratio": 0.6, "reject_ratio": 0.1},
        "fcm": {"m": 1.8, "tol": 1e-6, "max_iter": 40},
        "nn": {"hidden": 8, "lookback": 5, "epochs": 20, "batch": 16,
               "learning_rate": 0.01, "patience": 2},
        "vstelf": {"train_len": 120, "verification_len": 60, "test_len": 20},
        "mtelf": {"sampling_minutes": 15}
    })");
    CHECK(app.bench.svr.C == 8.0);
    CHECK(app.bench.svr.epsilon == 0.01);
    CHECK(app.bench.svr.tol == 1e-4);
    CHECK(app.bench.svr.max_iter == 5000);
    CHECK(app.bench.svr.cache_bytes == (std::size_t{16} << 20));
    CHECK(app.bench.kernel.kind == KernelKind::anova_rbf);
    CHECK(app.bench.kernel.sigma == 2.5);
    CHECK(app.bench.kernel.degree == 3);
    CHECK(app.bench.sbc.radius == 0.3);
    CHECK(app.bench.fcm.m == 1.8);
    CHECK(app.bench.nn_hidden == 8);
    CHECK(app.bench.nn_lookback == 5);
    CHECK(app.bench.nn.epochs == 20);
    CHECK(app.bench.nn.learning_rate == 0.01);
    CHECK(app.bench.vstelf.train_len == 120);
    CHECK(app.bench.vstelf.test_len == 20);
    CHECK(app.bench.stelf.train_len == 3000); // untouched section keeps defaults
    CHECK(app.bench.mtelf.sampling_minutes == 15);
    CHECK(app.bench.mtelf.train_len == 4000);
}

TEST_CASE("a misspelled key is caught with its full path") {
    try {
        parse_config_text(R"({"svr": {"epsilonn": 0.1}})");
        FAIL("expected UnknownKey");
    } catch (const UnknownKey& e) {
        CHECK(e.key() == "svr.epsilonn");
    }
    CHECK_THROWS_AS(parse_config_text(R"({"runz": 3})"), UnknownKey);
    CHECK_THROWS_AS(parse_config_text(R"({"nn": {"layers": 2}})"), UnknownKey);
    CHECK_THROWS_AS(parse_config_text(R"({"vstelf": {"window_count": 3}})"), UnknownKey);
}

TEST_CASE("wrong JSON types are reported per key") {
    CHECK_THROWS_AS(parse_config_text(R"({"runs": "ten"})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"runs": -1})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"seed": -4})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"data": 5})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"models": "svr"})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"models": ["xgboost"]})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"terms": ["daily"]})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"svr": 3})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"svr": {"c": "big"}})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"kernel": {"type": "poly"}})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"({"synthetic_days": 0})"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text(R"([1, 2])"), TypeMismatch);
    CHECK_THROWS_AS(parse_config_text("{not json"), ToolkitError);
}

TEST_CASE("values the validators reject do not survive parsing") {
    CHECK_THROWS_AS(parse_config_text(R"({"svr": {"epsilon": -1}})"), ToolkitError);
    CHECK_THROWS_AS(parse_config_text(R"({"models": []})"), ToolkitError);
    CHECK_THROWS_AS(parse_config_text(R"({"models": ["svr", "svr"]})"), ToolkitError);
    CHECK_THROWS_AS(parse_config_text(R"({"runs": 0})"), ToolkitError);
    CHECK_THROWS_AS(parse_config_text(R"({"sbc": {"radius": 0}})"), ToolkitError);
}

TEST_CASE("parse_config reads a file and flags a missing one") {
    const std::string path = "config_test_tmp.json";
    {
        std::ofstream out(path);
        out << R"({"runs": 2, "models": ["sbc"]})";
    }
    const AppConfig app = parse_config(path);
    CHECK(app.bench.runs == 2);
    REQUIRE(app.bench.models.size() == 1);
    CHECK(app.bench.models[0] == ModelKind::sbc);
    std::remove(path.c_str());
    CHECK_THROWS_AS(parse_config("definitely_absent.json"), FileNotFound);
}
