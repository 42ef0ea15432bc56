#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gammaflow/paths.hpp"
#include "gammaflow/space.hpp"

namespace gammaflow {

/// The process phi(t) = n^{1/2} 2^{n/2} xi_n x_n on [2^{-n}, 2^{-n+1}),
/// with independent xi_n ~ Bernoulli(1/n), truncated at n <= levels. It is
/// scalarly square integrable almost surely, yet pathwise the pairing with a
/// suitable x is not.
struct Example29Result {
    std::size_t levels = 0;
    std::size_t paths = 0;
    std::vector<std::uint8_t> successes;  // paths x levels, xi_n for n = 1..levels
    std::vector<double> statistic;        // per path: sum_k n_k / k^2 over successes n_1 < n_2 < ...

    std::span<const std::uint8_t> xi(std::size_t m) const { return {successes.data() + m * levels, levels}; }
    /// Fraction of paths with xi_n = 1, n is 1-based.
    double success_rate(std::size_t n) const;
};

/// Samples xi from the bundle seed; the bundle must live on [0, 1] and
/// `target_dim` (d_E) must be at least `levels`.
Example29Result example29_process(std::size_t levels, const PathBundle& bundle, std::size_t target_dim);

/// sum_k n_k a_k^2 with a_k = 1/k, where n_1 < n_2 < ... are the indices with xi = 1.
double example29_statistic(std::span<const std::uint8_t> xi);

/// Same quantity as the integral of [phi(t), x]^2 over the dyadic partition
/// of (0, 1], with x = sum_k a_k x_{n_k}.
double example29_statistic_by_quadrature(std::span<const std::uint8_t> xi);

/// phi(t, omega) in E = R^{target_dim}.
Vector example29_value(std::span<const std::uint8_t> xi, double t, std::size_t target_dim);

/// E-valued Brownian motion with covariance C built as W(t) = U B(t), where
/// U is the symmetric PSD square root of C and B is standard Brownian
/// motion taken from the bundle (d_H must equal d_E).
struct CovarianceBrownian {
    Matrix factor;                   // U, d_E x d_E
    std::size_t bins = 0;
    std::size_t dim = 0;
    std::vector<double> positions;   // paths x (bins + 1) x dim

    std::size_t paths() const { return dim == 0 ? 0 : positions.size() / ((bins + 1) * dim); }
    std::span<const double> at(std::size_t m, std::size_t index) const {
        return {positions.data() + (m * (bins + 1) + index) * dim, dim};
    }
    /// The cylindrical reinterpretation applied to i_C^* x*: the scalar
    /// paths <W(t_i), x*>, layout paths x (bins + 1).
    std::vector<double> pairing(std::span<const double> xstar) const;
};

/// Throws InputError if C is not symmetric (1e-12) or has an eigenvalue
/// below -tolerance.
CovarianceBrownian rkhs_from_covariance(const Matrix& covariance, const PathBundle& bundle,
                                        double tolerance = 1e-12);

}  // namespace gammaflow
