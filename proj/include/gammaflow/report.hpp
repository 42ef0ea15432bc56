#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "gammaflow/harness.hpp"

namespace gammaflow {

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(const std::string& s);

/// Column order of the CSV header; JSON objects use the same keys in the
/// same order.
const std::vector<std::string>& report_columns();

/// Numbers are written with 17 significant digits, so both formats carry
/// identical values.
void write_csv(const std::vector<RatioReport>& rows, std::ostream& out);
void write_json(const std::vector<RatioReport>& rows, std::ostream& out);
void write_report(const std::vector<RatioReport>& rows, ReportFormat format, std::ostream& out);
/// Writes to a file; IoError on failure.
void write_report(const std::vector<RatioReport>& rows, ReportFormat format, const std::string& file);

/// Aligned human-readable table.
void write_pretty(const std::vector<RatioReport>& rows, std::ostream& out);

}  // namespace gammaflow
