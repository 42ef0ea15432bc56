#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gammaflow/paths.hpp"
#include "gammaflow/rng.hpp"
#include "gammaflow/space.hpp"

namespace gammaflow {

/// Everything an experiment run needs. Defaults match the documented
/// config file; see README.
struct ExperimentConfig {
    std::string experiment = "ito_isometry";
    std::string space_variant = "hilbert";  // "hilbert" or "lq"
    std::size_t d_e = 4;
    double q = 2.0;
    std::vector<double> weights;  // empty: unit weights
    std::size_t d_h = 2;
    double horizon = 1.0;
    std::size_t bins = 16;
    std::size_t paths = 100000;
    double p = 2.0;
    std::uint64_t seed = 7;
    NoiseMode mode = NoiseMode::gaussian;
    NormalMethod normal_method = NormalMethod::box_muller;
    std::size_t depth = 6;           // sign-tree depth for the exact oracle
    std::size_t oracle_d_h = 1;      // d_H on sign trees
    std::size_t processes = 20;      // random integrands, operators or specs per run
    std::size_t gamma_samples = 256; // Gaussian draws per path for non-Hilbert gamma norms
    std::size_t trials = 8;          // UMD trials
    double tolerance = 1e-12;
    bool timing = false;             // fill wallclock_ms (breaks byte-identical reports)
    std::string out;                 // report file; empty means standard output
    std::string format = "csv";      // "csv" or "json"

    BanachSpaceSpec space() const;
    HilbertSpec hilbert() const { return HilbertSpec{d_h}; }
    TimeGrid grid() const { return TimeGrid(horizon, bins); }
};

/// Parses a JSON config on top of the defaults. Unknown keys and invalid
/// values raise InputError with the key path, e.g. "space.q: ...".
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& file);

/// Range and budget checks; returns warnings for legal but unusual choices.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace gammaflow
