#include "gammaflow/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "gammaflow/errors.hpp"

namespace gammaflow {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw InputError("unknown format \"" + s + "\"; expected csv or json");
}

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols = {
        "experiment", "anchor", "p",   "space_variant", "d_E",        "q",    "d_H",       "T",
        "N_t",        "M",      "seed", "mode",         "lhs",        "lhs_stderr", "rhs", "rhs_stderr",
        "ratio",      "ci_low", "ci_high", "predicate", "pass",       "generator_version", "wallclock_ms"};
    return cols;
}

void write_csv(const std::vector<RatioReport>& rows, std::ostream& out) {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.experiment) << ',' << csv_field(r.anchor) << ',' << num(r.p) << ','
            << csv_field(r.space_variant) << ',' << r.d_e << ',' << num(r.q) << ',' << r.d_h << ',' << num(r.horizon)
            << ',' << r.bins << ',' << r.paths << ',' << r.seed << ',' << csv_field(r.mode) << ',' << num(r.lhs) << ','
            << num(r.lhs_stderr) << ',' << num(r.rhs) << ',' << num(r.rhs_stderr) << ',' << num(r.ratio) << ','
            << num(r.ci_low) << ',' << num(r.ci_high) << ',' << csv_field(r.predicate) << ','
            << (r.pass ? "true" : "false") << ',' << csv_field(r.generator_version) << ',' << num(r.wallclock_ms)
            << '\n';
    }
}

void write_json(const std::vector<RatioReport>& rows, std::ostream& out) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["experiment"] = r.experiment;
        j["anchor"] = r.anchor;
        j["p"] = r.p;
        j["space_variant"] = r.space_variant;
        j["d_E"] = r.d_e;
        j["q"] = r.q;
        j["d_H"] = r.d_h;
        j["T"] = r.horizon;
        j["N_t"] = r.bins;
        j["M"] = r.paths;
        j["seed"] = r.seed;
        j["mode"] = r.mode;
        j["lhs"] = r.lhs;
        j["lhs_stderr"] = r.lhs_stderr;
        j["rhs"] = r.rhs;
        j["rhs_stderr"] = r.rhs_stderr;
        j["ratio"] = r.ratio;
        j["ci_low"] = r.ci_low;
        j["ci_high"] = r.ci_high;
        j["predicate"] = r.predicate;
        j["pass"] = r.pass;
        j["generator_version"] = r.generator_version;
        j["wallclock_ms"] = r.wallclock_ms;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

void write_report(const std::vector<RatioReport>& rows, ReportFormat format, std::ostream& out) {
    if (rows.empty()) throw InputError("report has no rows");
    if (format == ReportFormat::csv)
        write_csv(rows, out);
    else
        write_json(rows, out);
}

void write_report(const std::vector<RatioReport>& rows, ReportFormat format, const std::string& file) {
    if (rows.empty()) throw InputError("report has no rows");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file + " for writing");
    write_report(rows, format, out);
    if (!out) throw IoError("write to " + file + " failed");
}

void write_pretty(const std::vector<RatioReport>& rows, std::ostream& out) {
    out << std::left << std::setw(21) << "experiment" << std::setw(46) << "case" << std::right << std::setw(13)
        << "lhs" << std::setw(13) << "rhs" << std::setw(11) << "ratio" << "  " << std::left << std::setw(25)
        << "ci" << "pass\n";
    for (const auto& r : rows) {
        const auto colon = r.predicate.find(':');
        const std::string label = r.predicate.substr(0, colon);
        std::ostringstream ci;
        ci << std::setprecision(4) << '[' << r.ci_low << ", " << r.ci_high << ']';
        out << std::left << std::setw(21) << r.experiment << std::setw(46) << label.substr(0, 45) << std::right
            << std::setprecision(6) << std::setw(13) << r.lhs << std::setw(13) << r.rhs << std::setw(11) << r.ratio
            << "  " << std::left << std::setw(25) << ci.str() << (r.pass ? "PASS" : "FAIL") << '\n';
    }
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.pass ? 0 : 1;
    out << rows.size() << " rows, " << failed << " failed\n";
}

}  // namespace gammaflow
