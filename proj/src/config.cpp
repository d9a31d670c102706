#include "kmreg/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "kmreg/errors.hpp"

namespace kmreg::config {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& section) {
    if (!obj.is_object()) throw ConfigError(section + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError(section + ": unknown key '" + key + "'");
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& section) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(section + "." + key + ": " + e.what());
    }
}

std::pair<double, double> get_pair(const json& obj, const char* key, std::pair<double, double> fallback,
                                   const std::string& section) {
    if (!obj.contains(key)) return fallback;
    const auto v = get_or<std::vector<double>>(obj, key, {}, section);
    if (v.size() != 2) throw ConfigError(section + "." + key + ": expected two numbers");
    return {v[0], v[1]};
}

ProfileComponent parse_component(const json& j, const std::string& section) {
    ProfileComponent c;
    if (!j.is_object() || !j.contains("kind")) throw ConfigError(section + ": component needs a 'kind'");
    const auto kind = get_or<std::string>(j, "kind", "", section);
    if (kind == "zero") {
        check_keys(j, {"kind"}, section);
        c.kind = ProfileComponent::Kind::zero;
    } else if (kind == "mode") {
        check_keys(j, {"kind", "k", "m", "amplitude"}, section);
        c.kind = ProfileComponent::Kind::mode;
        c.k = get_or<std::size_t>(j, "k", 1, section);
        c.m = get_or<std::size_t>(j, "m", 1, section);
        c.amplitude = get_or<double>(j, "amplitude", 1.0, section);
    } else if (kind == "bump") {
        check_keys(j, {"kind", "center", "width", "amplitude"}, section);
        c.kind = ProfileComponent::Kind::bump;
        std::tie(c.center_x, c.center_y) = get_pair(j, "center", {0.5, 0.5}, section);
        c.width = get_or<double>(j, "width", 0.1, section);
        c.amplitude = get_or<double>(j, "amplitude", 1.0, section);
    } else if (kind == "piecewise") {
        check_keys(j, {"kind", "x", "y", "amplitude"}, section);
        c.kind = ProfileComponent::Kind::piecewise;
        std::tie(c.x0, c.x1) = get_pair(j, "x", {c.x0, c.x1}, section);
        std::tie(c.y0, c.y1) = get_pair(j, "y", {c.y0, c.y1}, section);
        c.amplitude = get_or<double>(j, "amplitude", 1.0, section);
    } else if (kind == "coefficients") {
        check_keys(j, {"kind", "values", "amplitude"}, section);
        c.kind = ProfileComponent::Kind::coefficients;
        c.coefficients = get_or<std::vector<double>>(j, "values", {}, section);
        c.amplitude = get_or<double>(j, "amplitude", 1.0, section);
    } else {
        throw ConfigError(section + ": unknown profile kind '" + kind + "'");
    }
    return c;
}

Profile parse_profile(const json& j, const std::string& section) {
    Profile p;
    if (j.is_array()) {
        for (const auto& item : j) p.push_back(parse_component(item, section));
    } else {
        p.push_back(parse_component(j, section));
    }
    return p;
}

json dump_component(const ProfileComponent& c) {
    switch (c.kind) {
        case ProfileComponent::Kind::zero: return {{"kind", "zero"}};
        case ProfileComponent::Kind::mode:
            return {{"kind", "mode"}, {"k", c.k}, {"m", c.m}, {"amplitude", c.amplitude}};
        case ProfileComponent::Kind::bump:
            return {{"kind", "bump"},
                    {"center", {c.center_x, c.center_y}},
                    {"width", c.width},
                    {"amplitude", c.amplitude}};
        case ProfileComponent::Kind::piecewise:
            return {{"kind", "piecewise"}, {"x", {c.x0, c.x1}}, {"y", {c.y0, c.y1}}, {"amplitude", c.amplitude}};
        case ProfileComponent::Kind::coefficients:
            return {{"kind", "coefficients"}, {"values", c.coefficients}, {"amplitude", c.amplitude}};
    }
    return {};
}

}  // namespace

ExperimentConfig parse(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(doc, {"schema_version", "domain", "basis", "problem", "ground_truth", "initial_rate", "experiment"},
               "config");
    if (!doc.contains("schema_version")) throw ConfigError("config: missing schema_version");
    const int version = get_or<int>(doc, "schema_version", 0, "config");
    if (version != kSchemaVersion) {
        throw ConfigError("config: unsupported schema_version " + std::to_string(version));
    }

    ExperimentConfig cfg;
    if (doc.contains("domain")) {
        const json& d = doc["domain"];
        check_keys(d, {"lx", "ly", "nx", "ny"}, "domain");
        cfg.domain.lx = get_or<double>(d, "lx", cfg.domain.lx, "domain");
        cfg.domain.ly = get_or<double>(d, "ly", cfg.domain.ly, "domain");
        cfg.domain.nx = get_or<std::size_t>(d, "nx", cfg.domain.nx, "domain");
        cfg.domain.ny = get_or<std::size_t>(d, "ny", cfg.domain.ny, "domain");
    }
    if (doc.contains("basis")) {
        const json& b = doc["basis"];
        check_keys(b, {"kmax"}, "basis");
        cfg.kmax = get_or<std::size_t>(b, "kmax", cfg.kmax, "basis");
    }
    if (!doc.contains("problem")) throw ConfigError("config: missing 'problem' section");
    {
        const json& p = doc["problem"];
        check_keys(p, {"method", "T", "a2", "gamma", "resonance_tol"}, "problem");
        if (!p.contains("method")) throw ConfigError("problem: missing 'method'");
        cfg.method = parse_method_kind(get_or<std::string>(p, "method", "", "problem"));
        cfg.t_end = get_or<double>(p, "T", cfg.t_end, "problem");
        cfg.a2 = get_or<double>(p, "a2", cfg.a2, "problem");
        cfg.gamma = get_or<double>(p, "gamma", cfg.gamma, "problem");
        cfg.resonance_tol = get_or<double>(p, "resonance_tol", cfg.resonance_tol, "problem");
    }
    if (doc.contains("ground_truth")) cfg.ground_truth = parse_profile(doc["ground_truth"], "ground_truth");
    if (doc.contains("initial_rate")) cfg.initial_rate = parse_profile(doc["initial_rate"], "initial_rate");
    if (doc.contains("experiment")) {
        const json& e = doc["experiment"];
        check_keys(e, {"noise_level", "seed", "checkpoints", "cross_validate_up_to"}, "experiment");
        cfg.noise_level = get_or<double>(e, "noise_level", cfg.noise_level, "experiment");
        cfg.seed = get_or<std::uint64_t>(e, "seed", cfg.seed, "experiment");
        cfg.checkpoints = get_or<std::vector<std::uint64_t>>(e, "checkpoints", cfg.checkpoints, "experiment");
        cfg.cross_validate_up_to = get_or<std::uint64_t>(e, "cross_validate_up_to", 0, "experiment");
    }

    cfg.validate();
    // kmax against the grid, and profile modes / coefficient counts against kmax.
    const BasisPtr basis = build_basis(cfg.domain, cfg.kmax, cfg.a2);
    try {
        (void)project_profile(cfg.ground_truth, basis);
        (void)project_profile(cfg.initial_rate, basis);
    } catch (const UsageError& e) {
        throw ConfigError(std::string("profile: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

std::string dump(const ExperimentConfig& cfg) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["domain"] = {{"lx", cfg.domain.lx}, {"ly", cfg.domain.ly}, {"nx", cfg.domain.nx}, {"ny", cfg.domain.ny}};
    doc["basis"] = {{"kmax", cfg.kmax}};
    doc["problem"] = {{"method", std::string(to_string(cfg.method))},
                      {"T", cfg.t_end},
                      {"a2", cfg.a2},
                      {"gamma", cfg.gamma},
                      {"resonance_tol", cfg.resonance_tol}};
    json gt = json::array();
    for (const auto& c : cfg.ground_truth) gt.push_back(dump_component(c));
    doc["ground_truth"] = gt;
    json rate = json::array();
    for (const auto& c : cfg.initial_rate) rate.push_back(dump_component(c));
    doc["initial_rate"] = rate;
    doc["experiment"] = {{"noise_level", cfg.noise_level},
                         {"seed", cfg.seed},
                         {"checkpoints", cfg.checkpoints},
                         {"cross_validate_up_to", cfg.cross_validate_up_to}};
    return doc.dump(2);
}

}  // namespace kmreg::config
