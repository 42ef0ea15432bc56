#include "gammaflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gammaflow/errors.hpp"
#include "gammaflow/harness.hpp"

namespace gammaflow {

namespace {

using json = nlohmann::json;

// Largest number of stored increments (both copies together).
constexpr double kMaxBundleValues = 268435456.0;

[[noreturn]] void fail(const std::string& key, const std::string& msg) { throw InputError(key + ": " + msg); }

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> known) {
    for (const auto& [k, v] : obj.items()) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) fail(prefix + k, "unknown key");
    }
}

std::size_t get_count(const json& v, const std::string& key, std::size_t min) {
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min))
        fail(key, "expected an integer >= " + std::to_string(min));
    return v.get<std::size_t>();
}

double get_real(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
}

std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

}  // namespace

BanachSpaceSpec ExperimentConfig::space() const {
    if (space_variant == "hilbert") return BanachSpaceSpec::hilbert(d_e);
    return BanachSpaceSpec::lq(d_e, q, weights);
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InputError("config must be a JSON object");
    reject_unknown(j, "", {"experiment", "space", "d_H", "grid", "paths", "p", "seed", "mode", "normal_method",
                           "depth", "oracle_d_H", "processes", "gamma_samples", "trials", "tolerance", "timing",
                           "out", "format"});
    ExperimentConfig c;
    if (j.contains("experiment")) c.experiment = get_string(j["experiment"], "experiment");
    if (j.contains("space")) {
        const json& s = j["space"];
        if (!s.is_object()) fail("space", "expected an object");
        reject_unknown(s, "space.", {"variant", "d_E", "q", "weights"});
        if (s.contains("variant")) c.space_variant = get_string(s["variant"], "space.variant");
        if (s.contains("d_E")) c.d_e = get_count(s["d_E"], "space.d_E", 1);
        if (s.contains("q")) c.q = get_real(s["q"], "space.q");
        if (s.contains("weights")) {
            if (!s["weights"].is_array()) fail("space.weights", "expected an array of numbers");
            c.weights.clear();
            for (std::size_t i = 0; i < s["weights"].size(); ++i)
                c.weights.push_back(get_real(s["weights"][i], "space.weights[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("d_H")) c.d_h = get_count(j["d_H"], "d_H", 1);
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_object()) fail("grid", "expected an object");
        reject_unknown(g, "grid.", {"T", "N_t"});
        if (g.contains("T")) c.horizon = get_real(g["T"], "grid.T");
        if (g.contains("N_t")) c.bins = get_count(g["N_t"], "grid.N_t", 1);
    }
    if (j.contains("paths")) c.paths = get_count(j["paths"], "paths", 2);
    if (j.contains("p")) c.p = get_real(j["p"], "p");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
            fail("seed", "expected a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    try {
        if (j.contains("mode")) c.mode = parse_noise_mode(get_string(j["mode"], "mode"));
    } catch (const InputError& e) {
        fail("mode", e.what());
    }
    try {
        if (j.contains("normal_method"))
            c.normal_method = parse_normal_method(get_string(j["normal_method"], "normal_method"));
    } catch (const InputError& e) {
        fail("normal_method", e.what());
    }
    if (j.contains("depth")) c.depth = get_count(j["depth"], "depth", 1);
    if (j.contains("oracle_d_H")) c.oracle_d_h = get_count(j["oracle_d_H"], "oracle_d_H", 1);
    if (j.contains("processes")) c.processes = get_count(j["processes"], "processes", 1);
    if (j.contains("gamma_samples")) c.gamma_samples = get_count(j["gamma_samples"], "gamma_samples", 2);
    if (j.contains("trials")) c.trials = get_count(j["trials"], "trials", 1);
    if (j.contains("tolerance")) c.tolerance = get_real(j["tolerance"], "tolerance");
    if (j.contains("timing")) {
        if (!j["timing"].is_boolean()) fail("timing", "expected true or false");
        c.timing = j["timing"].get<bool>();
    }
    if (j.contains("out")) c.out = get_string(j["out"], "out");
    if (j.contains("format")) c.format = get_string(j["format"], "format");
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read config file " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
    std::vector<std::string> warnings;
    find_experiment(c.experiment);
    if (c.space_variant != "hilbert" && c.space_variant != "lq")
        fail("space.variant", "expected \"hilbert\" or \"lq\"");
    if (c.d_e < 1) fail("space.d_E", "must be at least 1");
    if (c.space_variant == "lq") {
        if (!(c.q > 1.0) || !std::isfinite(c.q)) fail("space.q", "q must lie in (1, ∞)");
        if (!c.weights.empty()) {
            if (c.weights.size() != c.d_e) fail("space.weights", "need exactly d_E weights");
            for (double w : c.weights)
                if (!(w > 0.0) || !std::isfinite(w)) fail("space.weights", "weights must be positive");
        }
    }
    if (c.d_h < 1) fail("d_H", "must be at least 1");
    if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) fail("grid.T", "must be positive");
    if (c.bins < 1) fail("grid.N_t", "must be at least 1");
    if (c.paths < 2) fail("paths", "need at least two paths");
    if (!(c.p >= 1.0) || !std::isfinite(c.p)) fail("p", "p must lie in [1, ∞)");
    if (c.p != 2.0 && c.p != 4.0) warnings.push_back("p outside {2, 4}");
    if (c.depth < 1) fail("depth", "must be at least 1");
    if (c.oracle_d_h < 1) fail("oracle_d_H", "must be at least 1");
    if (!(c.tolerance >= 0.0)) fail("tolerance", "must be nonnegative");
    if (c.format != "csv" && c.format != "json") fail("format", "expected \"csv\" or \"json\"");
    const double values = 2.0 * static_cast<double>(c.paths) * static_cast<double>(c.bins) * static_cast<double>(c.d_h);
    if (values > kMaxBundleValues)
        throw BudgetExceeded("path bundle of " + std::to_string(c.paths) + " x " + std::to_string(c.bins) + " x " +
                             std::to_string(c.d_h) + " increments exceeds the memory budget");
    return warnings;
}

std::string config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = c.experiment;
    j["space"] = {{"variant", c.space_variant}, {"d_E", c.d_e}, {"q", c.q}, {"weights", c.weights}};
    j["d_H"] = c.d_h;
    j["grid"] = {{"T", c.horizon}, {"N_t", c.bins}};
    j["paths"] = c.paths;
    j["p"] = c.p;
    j["seed"] = c.seed;
    j["mode"] = to_string(c.mode);
    j["normal_method"] = to_string(c.normal_method);
    j["depth"] = c.depth;
    j["oracle_d_H"] = c.oracle_d_h;
    j["processes"] = c.processes;
    j["gamma_samples"] = c.gamma_samples;
    j["trials"] = c.trials;
    j["tolerance"] = c.tolerance;
    j["timing"] = c.timing;
    j["out"] = c.out;
    j["format"] = c.format;
    return j.dump(2);
}

}  // namespace gammaflow
