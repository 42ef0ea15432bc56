#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gammaflow/config.hpp"
#include "gammaflow/exec.hpp"
#include "gammaflow/paths.hpp"
#include "gammaflow/stats.hpp"

namespace gammaflow {

/// Half-width of every reported confidence interval, in standard errors.
inline constexpr double kCiWidth = 4.0;

struct CatalogEntry {
    std::string name;
    std::string anchor;     // the result being checked
    std::string summary;
    std::string predicate;  // how a row passes
};

const std::vector<CatalogEntry>& catalog();
/// InputError listing the valid names when `name` is unknown.
const CatalogEntry& find_experiment(const std::string& name);

/// One row of a report: the two sides of an inequality or identity, their
/// ratio with a confidence interval, and whether the row's predicate held.
/// The predicate text starts with a case label such as "phi[3]".
struct RatioReport {
    std::string experiment;
    std::string anchor;
    double p = 2.0;
    std::string space_variant;
    std::size_t d_e = 0;
    double q = 2.0;
    std::size_t d_h = 0;
    double horizon = 0.0;
    std::size_t bins = 0;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
    std::string mode;
    double lhs = 0.0;
    double lhs_stderr = 0.0;
    double rhs = 0.0;
    double rhs_stderr = 0.0;
    double ratio = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::string predicate;
    bool pass = false;
    std::string generator_version;
    double wallclock_ms = 0.0;
};

/// Runs one catalog experiment. A supplied bundle replaces the sampled one
/// wherever the experiment works on the configured grid.
std::vector<RatioReport> run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::parallel,
                                        const PathBundle* bundle = nullptr);

/// The configurations behind `suite`: every catalog entry with the settings
/// used for acceptance, all on the given seed. `paths` overrides M where set.
std::vector<ExperimentConfig> suite_configs(std::uint64_t seed, std::optional<std::size_t> paths = std::nullopt);

std::vector<RatioReport> run_suite(std::uint64_t seed, Exec exec = Exec::parallel,
                                   std::optional<std::size_t> paths = std::nullopt, bool timing = false);

bool all_pass(const std::vector<RatioReport>& rows);

/// (E|N|^q)^{1/q} for a standard normal N.
double gaussian_moment_constant(double q);

}  // namespace gammaflow
