#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gammaflow/process.hpp"
#include "gammaflow/rng.hpp"
#include "gammaflow/space.hpp"

namespace gammaflow {

/// Version tag of the random process generators below; reports carry it so
/// that a row can be regenerated from (seed, index).
std::string generator_version(NormalMethod method);

/// Piecewise constant in time with Gaussian entries, on a random partition
/// of at most four intervals. Stream (seed, process_generator, index).
ElementaryProcess random_deterministic_process(const TimeGrid& grid, const HilbertSpec& h,
                                               const BanachSpaceSpec& e, std::uint64_t seed,
                                               std::size_t index);

/// Adapted elementary process: the first interval is constant, later
/// intervals cycle through indicator, linear-in-the-past and constant rules
/// starting at an offset given by `index`, so consecutive indices cover all
/// three rule classes.
ElementaryProcess random_adapted_process(const TimeGrid& grid, const HilbertSpec& h,
                                         const BanachSpaceSpec& e, std::uint64_t seed, std::size_t index);

/// Same shapes with small integer entries and thresholds, intended for sign
/// trees with dyadic sqrt(dt) where every value stays exactly representable.
ElementaryProcess random_integer_process(const TimeGrid& grid, const HilbertSpec& h,
                                         const BanachSpaceSpec& e, std::uint64_t seed, std::size_t index);

/// Rows x cols standard normal matrix from stream (seed, experiment, index).
Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::size_t index);

/// First-chaos martingale M(t) = sum_{i, k} B_{ik} dW[i][k] over bins with
/// t_{i+1} <= t, with fixed gamma(H, E) coefficients B_{ik}.
struct MartingaleSpec {
    TimeGrid grid;
    HilbertSpec h;
    BanachSpaceSpec e;
    std::vector<Matrix> coefficients;  // bins * d_H matrices, each d_E x d_H

    const Matrix& b(std::size_t bin, std::size_t k) const { return coefficients[bin * h.dim + k]; }
    /// M(t_index) on one path, row-major d_E x d_H into out.
    void value(std::span<const double> path_increments, std::size_t index, double* out) const;
};

MartingaleSpec random_martingale_spec(const TimeGrid& grid, const HilbertSpec& h, const BanachSpaceSpec& e,
                                      std::uint64_t seed, std::size_t index);

}  // namespace gammaflow
