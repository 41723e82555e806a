#include "loadcast/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace loadcast {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const std::string& key = item.key();
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }))
            throw UnknownKey(prefix.empty() ? key : prefix + "." + key);
    }
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw TypeMismatch(path, "expected a number");
    return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned())
        throw TypeMismatch(path, "expected an integer");
    if (j.is_number_integer() && j.get<long long>() < 0)
        throw TypeMismatch(path, "must not be negative");
    return j.get<std::size_t>();
}

std::uint64_t as_seed(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned())
        throw TypeMismatch(path, "expected an integer");
    if (j.is_number_integer() && j.get<long long>() < 0)
        throw TypeMismatch(path, "must not be negative");
    return j.get<std::uint64_t>();
}

std::string as_text(const json& j, const std::string& path) {
    if (!j.is_string()) throw TypeMismatch(path, "expected a string");
    return j.get<std::string>();
}

const json& as_section(const json& j, const std::string& path) {
    if (!j.is_object()) throw TypeMismatch(path, "expected a nested section");
    return j;
}

void read_svr(const json& j, SvrHyperParams& p) {
    check_keys(j, "svr", {"c", "epsilon", "tol", "max_iter", "cache_mb"});
    if (j.contains("c")) p.C = as_number(j["c"], "svr.c");
    if (j.contains("epsilon")) p.epsilon = as_number(j["epsilon"], "svr.epsilon");
    if (j.contains("tol")) p.tol = as_number(j["tol"], "svr.tol");
    if (j.contains("max_iter")) p.max_iter = as_count(j["max_iter"], "svr.max_iter");
    if (j.contains("cache_mb"))
        p.cache_bytes = as_count(j["cache_mb"], "svr.cache_mb") << 20;
}

void read_kernel(const json& j, KernelSpec& k) {
    check_keys(j, "kernel", {"type", "sigma", "degree"});
    if (j.contains("type")) k.kind = kernel_kind_from_name(as_text(j["type"], "kernel.type"));
    if (j.contains("sigma")) k.sigma = as_number(j["sigma"], "kernel.sigma");
    if (j.contains("degree")) k.degree = as_count(j["degree"], "kernel.degree");
}

void read_sbc(const json& j, SbcParams& p) {
    check_keys(j, "sbc", {"radius", "squash", "accept_ratio", "reject_ratio"});
    if (j.contains("radius")) p.radius = as_number(j["radius"], "sbc.radius");
    if (j.contains("squash")) p.squash = as_number(j["squash"], "sbc.squash");
    if (j.contains("accept_ratio"))
        p.accept_ratio = as_number(j["accept_ratio"], "sbc.accept_ratio");
    if (j.contains("reject_ratio"))
        p.reject_ratio = as_number(j["reject_ratio"], "sbc.reject_ratio");
}

void read_fcm(const json& j, FcmParams& p) {
    check_keys(j, "fcm", {"m", "tol", "max_iter"});
    if (j.contains("m")) p.m = as_number(j["m"], "fcm.m");
    if (j.contains("tol")) p.tol = as_number(j["tol"], "fcm.tol");
    if (j.contains("max_iter")) p.max_iter = as_count(j["max_iter"], "fcm.max_iter");
}

void read_nn(const json& j, BenchConfig& b) {
    check_keys(j, "nn",
               {"hidden", "lookback", "epochs", "batch", "learning_rate", "patience"});
    if (j.contains("hidden")) b.nn_hidden = as_count(j["hidden"], "nn.hidden");
    if (j.contains("lookback")) b.nn_lookback = as_count(j["lookback"], "nn.lookback");
    if (j.contains("epochs")) b.nn.epochs = as_count(j["epochs"], "nn.epochs");
    if (j.contains("batch")) b.nn.batch = as_count(j["batch"], "nn.batch");
    if (j.contains("learning_rate"))
        b.nn.learning_rate = as_number(j["learning_rate"], "nn.learning_rate");
    if (j.contains("patience")) b.nn.patience = as_count(j["patience"], "nn.patience");
}

void read_term(const json& j, const std::string& name, TermConfig& tc) {
    check_keys(j, name, {"sampling_minutes", "train_len", "verification_len", "test_len"});
    if (j.contains("sampling_minutes")) {
        const std::size_t m = as_count(j["sampling_minutes"], name + ".sampling_minutes");
        if (m == 0) throw TypeMismatch(name + ".sampling_minutes", "must be at least 1");
        tc.sampling_minutes = static_cast<std::int64_t>(m);
    }
    if (j.contains("train_len")) tc.train_len = as_count(j["train_len"], name + ".train_len");
    if (j.contains("verification_len"))
        tc.verification_len = as_count(j["verification_len"], name + ".verification_len");
    if (j.contains("test_len")) tc.test_len = as_count(j["test_len"], name + ".test_len");
}

} // namespace

AppConfig parse_config_text(const std::string& text) {
    AppConfig app;
    const bool blank =
        std::all_of(text.begin(), text.end(),
                    [](unsigned char c) { return std::isspace(c) != 0; });
    if (blank) return app;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ToolkitError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw TypeMismatch("config", "top level must be an object");

    check_keys(doc, "",
               {"data", "synthetic_days", "synthetic_seed", "seed", "runs", "horizon", "out",
                "models", "terms", "svr", "kernel", "sbc", "fcm", "nn", "vstelf", "stelf",
                "mtelf"});

    if (doc.contains("data")) app.data_csv = as_text(doc["data"], "data");
    if (doc.contains("synthetic_days")) {
        app.synthetic_days = as_count(doc["synthetic_days"], "synthetic_days");
        if (app.synthetic_days == 0)
            throw TypeMismatch("synthetic_days", "must be at least 1");
    }
    if (doc.contains("synthetic_seed"))
        app.synthetic_seed = as_seed(doc["synthetic_seed"], "synthetic_seed");
    if (doc.contains("seed")) app.bench.seed = as_seed(doc["seed"], "seed");
    if (doc.contains("runs")) app.bench.runs = as_count(doc["runs"], "runs");
    if (doc.contains("horizon")) app.bench.horizon = as_count(doc["horizon"], "horizon");
    if (doc.contains("out")) app.out_dir = as_text(doc["out"], "out");

    if (doc.contains("models")) {
        const json& arr = doc["models"];
        if (!arr.is_array()) throw TypeMismatch("models", "expected an array of names");
        app.bench.models.clear();
        for (const json& m : arr)
            app.bench.models.push_back(model_kind_from_name(as_text(m, "models")));
    }
    if (doc.contains("terms")) {
        const json& arr = doc["terms"];
        if (!arr.is_array()) throw TypeMismatch("terms", "expected an array of names");
        app.bench.terms.clear();
        for (const json& t : arr)
            app.bench.terms.push_back(term_from_name(as_text(t, "terms")));
    }

    if (doc.contains("svr")) read_svr(as_section(doc["svr"], "svr"), app.bench.svr);
    if (doc.contains("kernel")) read_kernel(as_section(doc["kernel"], "kernel"), app.bench.kernel);
    if (doc.contains("sbc")) read_sbc(as_section(doc["sbc"], "sbc"), app.bench.sbc);
    if (doc.contains("fcm")) read_fcm(as_section(doc["fcm"], "fcm"), app.bench.fcm);
    if (doc.contains("nn")) read_nn(as_section(doc["nn"], "nn"), app.bench);
    if (doc.contains("vstelf"))
        read_term(as_section(doc["vstelf"], "vstelf"), "vstelf", app.bench.vstelf);
    if (doc.contains("stelf"))
        read_term(as_section(doc["stelf"], "stelf"), "stelf", app.bench.stelf);
    if (doc.contains("mtelf"))
        read_term(as_section(doc["mtelf"], "mtelf"), "mtelf", app.bench.mtelf);

    app.bench.validate();
    return app;
}

AppConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace loadcast
