#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gammaflow/exec.hpp"
#include "gammaflow/rng.hpp"
#include "gammaflow/space.hpp"

namespace gammaflow {

enum class NoiseMode : std::uint8_t { gaussian = 0, rademacher = 1 };

std::string to_string(NoiseMode m);
NoiseMode parse_noise_mode(const std::string& s);

/// Sampled increments of an H-cylindrical Brownian motion on a time grid,
/// plus an independent copy used for decoupled integrals. Layout is
/// row-major [path][bin][coordinate].
class PathBundle {
public:
    PathBundle(TimeGrid grid, std::size_t d_h, std::size_t paths, std::uint64_t seed, NoiseMode mode,
               std::vector<double> increments, std::vector<double> decoupled);

    const TimeGrid& grid() const { return grid_; }
    std::size_t d_h() const { return d_h_; }
    std::size_t paths() const { return paths_; }
    std::uint64_t seed() const { return seed_; }
    NoiseMode mode() const { return mode_; }
    /// Values per path: bins * d_H.
    std::size_t stride() const { return grid_.bins() * d_h_; }

    std::span<const double> path(std::size_t m) const {
        return {dw_.data() + m * stride(), stride()};
    }
    std::span<const double> decoupled_path(std::size_t m) const {
        return {dw_tilde_.data() + m * stride(), stride()};
    }
    double increment(std::size_t m, std::size_t bin, std::size_t k) const {
        return dw_[m * stride() + bin * d_h_ + k];
    }
    const std::vector<double>& increments() const { return dw_; }
    const std::vector<double>& decoupled() const { return dw_tilde_; }

    bool operator==(const PathBundle&) const = default;

private:
    TimeGrid grid_;
    std::size_t d_h_;
    std::size_t paths_;
    std::uint64_t seed_;
    NoiseMode mode_;
    std::vector<double> dw_;
    std::vector<double> dw_tilde_;
};

/// Path m draws from stream (seed, increments, m); its decoupled copy from
/// (seed, decoupled_increments, m).
PathBundle sample_paths(const TimeGrid& grid, std::size_t d_h, std::size_t paths, std::uint64_t seed,
                        NoiseMode mode, NormalMethod method = NormalMethod::box_muller,
                        Exec exec = Exec::parallel);

/// Flat little-endian dump: "GFPB", u32 version, u64 M, u64 N_t, u64 d_H,
/// u8 mode, u64 seed, then f64 increments and f64 decoupled increments.
void save_bundle(const PathBundle& bundle, const std::filesystem::path& file);
/// The file does not carry T, so the horizon must be supplied.
PathBundle load_bundle(const std::filesystem::path& file, double horizon);

}  // namespace gammaflow
