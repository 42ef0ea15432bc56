#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gammaflow/config.hpp"
#include "gammaflow/errors.hpp"
#include "gammaflow/harness.hpp"
#include "gammaflow/report.hpp"

using namespace gammaflow;

namespace {

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

RatioReport sample_row() {
    RatioReport r;
    r.experiment = "ito_isometry";
    r.anchor = "Ito isometry for deterministic integrands";
    r.space_variant = "hilbert";
    r.d_e = 4;
    r.d_h = 2;
    r.horizon = 1.0;
    r.bins = 16;
    r.paths = 1000;
    r.seed = 7;
    r.mode = "gaussian";
    r.lhs = 0.1;
    r.lhs_stderr = 1.0 / 3.0;
    r.rhs = 2.0 / 3.0;
    r.rhs_stderr = 0.0;
    r.ratio = r.lhs / r.rhs;
    r.ci_low = r.ratio - 1e-17;
    r.ci_high = r.ratio + 1e-3;
    r.predicate = "phi[0]: a, \"quoted\" predicate";
    r.pass = true;
    r.generator_version = "v1;normal=box_muller";
    return r;
}

// Shrunk copies of the suite entries, fast enough for a unit test.
std::vector<ExperimentConfig> small_configs() {
    auto cfgs = suite_configs(7, 2000);
    for (auto& c : cfgs) {
        c.processes = std::min<std::size_t>(c.processes, 2);
        c.gamma_samples = 64;
        c.depth = std::min<std::size_t>(c.depth, 5);
        c.trials = 2;
    }
    return cfgs;
}

}  // namespace

TEST_CASE("catalog") {
    const auto& cat = catalog();
    CHECK(cat.size() == 14);
    std::set<std::string> names;
    for (const auto& e : cat) {
        CHECK_FALSE(e.anchor.empty());
        CHECK_FALSE(e.predicate.empty());
        names.insert(e.name);
        CHECK(&find_experiment(e.name) == &e);
    }
    CHECK(names.size() == cat.size());
    for (const char* n : {"ito_isometry", "gamma_fubini", "umd_oracle", "decoupling", "two_sided", "bdg", "doob",
                          "square_function", "type_cotype", "localization", "tail_bound", "example29",
                          "martingale_integrand", "iterated_integral"})
        CHECK(names.count(n) == 1);
    CHECK_THROWS_AS(find_experiment("nope"), InputError);
}

TEST_CASE("config defaults and parsing") {
    const auto c = parse_config("{}");
    CHECK(c.experiment == "ito_isometry");
    CHECK(c.d_e == 4);
    CHECK(c.d_h == 2);
    CHECK(c.bins == 16);
    CHECK(c.paths == 100000);
    CHECK(c.seed == 7);
    CHECK(c.p == 2.0);

    const auto d = parse_config(R"({"experiment": "doob", "space": {"variant": "lq", "d_E": 3, "q": 4, "weights": [1, 2, 3]},
                                    "grid": {"T": 2.5, "N_t": 5}, "paths": 10, "seed": 99, "mode": "rademacher"})");
    CHECK(d.experiment == "doob");
    CHECK(d.space().q() == 4.0);
    CHECK(d.space().weight(2) == 3.0);
    CHECK(d.grid().dt() == 0.5);
    CHECK(d.mode == NoiseMode::rademacher);
    CHECK(d.format == "csv");
    CHECK(parse_config(R"({"out": "r.json", "format": "json"})").out == "r.json");

    CHECK(parse_config(config_to_json(d)).seed == 99);
    CHECK(config_to_json(parse_config(config_to_json(d))) == config_to_json(d));
}

TEST_CASE("config errors name the key") {
    CHECK(error_of(R"({"space": {"variant": "lq", "q": 1}})").find("space.q: q must lie in (1, ∞)") == 0);
    CHECK(error_of(R"({"grid": {"N_t": 0}})").find("grid.N_t") == 0);
    CHECK(error_of(R"({"space": {"foo": 1}})") == "space.foo: unknown key");
    CHECK(error_of(R"({"pathz": 3})") == "pathz: unknown key");
    CHECK(error_of(R"({"paths": "many"})").find("paths") == 0);
    CHECK(error_of(R"({"experiment": "bogus"})").find("bogus") != std::string::npos);
    CHECK(error_of(R"({"p": 0.5})").find("p: ") == 0);
    CHECK(error_of("{not json").find("not valid JSON") != std::string::npos);
    CHECK(error_of("[1, 2]") == "config must be a JSON object");
    CHECK(error_of(R"({"format": "xml"})").find("format: ") == 0);
    CHECK_THROWS_AS(parse_config(R"({"paths": 100000000, "grid": {"N_t": 64}})"), BudgetExceeded);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);

    ExperimentConfig c;
    c.p = 3.0;
    CHECK(validate_config(c).size() == 1);
    c.p = 4.0;
    CHECK(validate_config(c).empty());
}

TEST_CASE("report writers") {
    const std::vector<RatioReport> one{sample_row()};
    std::ostringstream csv;
    write_csv(one, csv);
    std::istringstream in(csv.str());
    std::string header, line, rest;
    std::getline(in, header);
    std::getline(in, line);
    CHECK_FALSE(std::getline(in, rest));
    CHECK(csv.str().back() == '\n');
    CHECK(split_csv_line(header) == report_columns());
    const auto fields = split_csv_line(line);
    REQUIRE(fields.size() == report_columns().size());
    CHECK(fields[19] == one[0].predicate);
    // 17 significant digits round-trip every double.
    CHECK(std::stod(fields[13]) == one[0].lhs_stderr);
    CHECK(std::stod(fields[14]) == one[0].rhs);
    CHECK(std::stod(fields[17]) == one[0].ci_low);

    std::ostringstream js;
    write_json(one, js);
    const auto j = nlohmann::ordered_json::parse(js.str());
    REQUIRE(j.size() == 1);
    std::size_t idx = 0;
    for (auto it = j[0].begin(); it != j[0].end(); ++it, ++idx) CHECK(it.key() == report_columns()[idx]);
    CHECK(j[0]["lhs_stderr"].get<double>() == one[0].lhs_stderr);
    CHECK(j[0]["predicate"].get<std::string>() == one[0].predicate);
    CHECK(j[0]["pass"].get<bool>());

    std::ostringstream sink;
    CHECK_THROWS_AS(write_report({}, ReportFormat::csv, sink), InputError);
    CHECK_THROWS_AS(write_report(one, ReportFormat::csv, std::string("/nonexistent/dir/out.csv")), IoError);
    CHECK(parse_report_format("json") == ReportFormat::json);
    CHECK_THROWS_AS(parse_report_format("xml"), InputError);

    std::ostringstream pretty;
    write_pretty(one, pretty);
    CHECK(pretty.str().find("1 rows, 0 failed") != std::string::npos);
}

TEST_CASE("every experiment yields well-formed, reproducible rows") {
    for (const auto& cfg : small_configs()) {
        CAPTURE(cfg.experiment);
        CAPTURE(cfg.space_variant);
        const auto rows = run_experiment(cfg);
        REQUIRE_FALSE(rows.empty());
        const auto& entry = find_experiment(cfg.experiment);
        for (const auto& r : rows) {
            CAPTURE(r.predicate);
            CHECK(r.experiment == cfg.experiment);
            CHECK(r.anchor == entry.anchor);
            CHECK_FALSE(r.predicate.empty());
            CHECK_FALSE(r.generator_version.empty());
            CHECK(r.wallclock_ms == 0.0);
            CHECK(std::isfinite(r.lhs));
            CHECK(std::isfinite(r.rhs));
            CHECK(r.lhs_stderr >= 0.0);
            CHECK(r.rhs_stderr >= 0.0);
            if (r.rhs > 0.0) CHECK(std::abs(r.ratio - r.lhs / r.rhs) <= 1e-12 * std::max(1.0, std::abs(r.ratio)));
            CHECK(r.ci_low <= r.ratio);
            CHECK(r.ratio <= r.ci_high);
        }
        std::ostringstream a, b;
        write_csv(rows, a);
        write_csv(run_experiment(cfg), b);
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("exact experiments pass at any size") {
    for (const char* name : {"gamma_fubini", "umd_oracle", "localization"}) {
        ExperimentConfig c;
        c.experiment = name;
        c.paths = 500;
        c.processes = 4;
        CHECK(all_pass(run_experiment(c)));
    }
}

TEST_CASE("oracle budget") {
    ExperimentConfig c;
    c.experiment = "umd_oracle";
    c.depth = 13;
    CHECK_THROWS_AS(run_experiment(c), BudgetExceeded);
}

TEST_CASE("Gaussian moment constants") {
    CHECK(gaussian_moment_constant(2.0) == doctest::Approx(1.0));
    CHECK(gaussian_moment_constant(4.0) == doctest::Approx(std::pow(3.0, 0.25)));
    CHECK(gaussian_moment_constant(1.0) == doctest::Approx(std::sqrt(2.0 / M_PI)));
}
