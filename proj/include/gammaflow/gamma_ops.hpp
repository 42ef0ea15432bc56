#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gammaflow/exec.hpp"
#include "gammaflow/rng.hpp"
#include "gammaflow/space.hpp"

namespace gammaflow {

/// An operator from the step-function subspace of L^2(0,T;H) into E, stored
/// as a dense d_E x (N_t * d_H) matrix. Column i * d_H + k is the image of
/// the basis element e_{i,k}.
class GammaOperator {
public:
    GammaOperator(Matrix matrix, TimeGrid grid, HilbertSpec h, BanachSpaceSpec e);

    static GammaOperator zero(const TimeGrid& grid, const HilbertSpec& h, const BanachSpaceSpec& e);

    const Matrix& matrix() const { return matrix_; }
    const TimeGrid& grid() const { return grid_; }
    const HilbertSpec& hilbert() const { return h_; }
    const BanachSpaceSpec& target() const { return e_; }
    std::size_t cols() const { return static_cast<std::size_t>(matrix_.cols()); }
    static std::size_t column(std::size_t bin, std::size_t coord, std::size_t d_h) {
        return bin * d_h + coord;
    }

    Vector apply(const L2StepFunction& f) const;
    /// R* x* as a step function, adjoint with respect to the weighted pairing.
    L2StepFunction adjoint_apply(std::span<const double> xstar) const;

private:
    Matrix matrix_;
    TimeGrid grid_;
    HilbertSpec h_;
    BanachSpaceSpec e_;
};

enum class NormMethod { exact_hilbert, gaussian_mc, square_function };

struct GammaNormEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
    NormMethod method = NormMethod::exact_hilbert;
};

/// Hilbert-Schmidt (Frobenius) norm; Hilbert targets only.
double gamma_norm_exact(const GammaOperator& r);

/// Frobenius norm of a bare matrix.
double frobenius(const Matrix& m);

/// Fixed set of Gaussian coefficient vectors g_1..g_S for the series
/// sum_n g_n R e_n. Row j is drawn from the stream (seed, gamma_series, j),
/// so estimates agree with gamma_norm_mc for the same seed.
class GaussianSeries {
public:
    GaussianSeries(std::size_t dim, std::size_t samples, std::uint64_t seed,
                   NormalMethod method = NormalMethod::box_muller,
                   Exec exec = Exec::parallel);

    std::size_t dim() const { return static_cast<std::size_t>(draws_.cols()); }
    std::size_t samples() const { return static_cast<std::size_t>(draws_.rows()); }
    const Matrix& draws() const { return draws_; }

    /// Squared norms ||A g_j||^2 for every draw, with ||.|| the norm of `e`.
    /// Columns of A beyond dim() are an error; fewer columns use a prefix.
    std::vector<double> squared_norms(const Matrix& a, const BanachSpaceSpec& e, Exec exec = Exec::serial) const;
    /// Estimate of (E||sum g_n A e_n||^2)^{1/2}. The serial default is safe
    /// inside parallel loops.
    GammaNormEstimate estimate(const Matrix& a, const BanachSpaceSpec& e, Exec exec = Exec::serial) const;

private:
    Matrix draws_;  // samples x dim
};

/// Per-path gamma norm: exact Frobenius for Hilbert targets, Gaussian
/// series with one shared draw set otherwise (common random numbers across
/// paths).
class GammaEvaluator {
public:
    GammaEvaluator(BanachSpaceSpec target, std::size_t dim, std::size_t mc_samples, std::uint64_t seed,
                   NormalMethod method = NormalMethod::box_muller);

    bool exact() const { return !series_.has_value(); }
    const BanachSpaceSpec& target() const { return target_; }
    double norm(const Matrix& a) const;
    /// Norms of the time truncations of `a` at every grid index 0..bins,
    /// where column blocks have width d_h.
    std::vector<double> truncation_profile(const Matrix& a, std::size_t d_h) const;

private:
    BanachSpaceSpec target_;
    std::optional<GaussianSeries> series_;
};

/// Second-moment estimator turned into a norm estimate with delta-method
/// standard error.
GammaNormEstimate norm_from_squares(std::span<const double> squares);

GammaNormEstimate gamma_norm_mc(const GammaOperator& r, std::size_t n_samples, std::uint64_t seed,
                                NormalMethod method = NormalMethod::box_muller,
                                Exec exec = Exec::parallel);

/// L^q norm of s -> (sum_i dt sum_k phi(t_i,s)[k]^2)^{1/2}; L^q targets only.
double square_function_norm(const GammaOperator& r);

/// B2 R B1 with B1 acting on step-function coefficients (square, N_t d_H).
/// `target` defaults to the source space when B2 is square, or Euclidean
/// space of the new dimension for Hilbert sources.
GammaOperator compose_ideal(const Matrix& b2, const GammaOperator& r, const Matrix& b1,
                            std::optional<BanachSpaceSpec> target = std::nullopt);

/// X composed with 1_{[0,t]}; t snaps to the grid.
GammaOperator truncate_time(const GammaOperator& r, double t);
/// Same, by grid index.
GammaOperator truncate_bins(const GammaOperator& r, std::size_t index);

/// R^delta f = R(f(. + delta)); delta snaps to a whole number of bins.
GammaOperator right_translate(const GammaOperator& r, double delta);

struct FubiniComparison {
    double lhs = 0.0;
    double lhs_stderr = 0.0;
    double rhs = 0.0;
    double rhs_stderr = 0.0;
    bool exact = false;
};

struct WeightedOperator {
    GammaOperator op;
    double weight;
};

/// Compares the L^p(S; gamma) norm of a finitely supported operator family
/// with the gamma norm of the assembled operator into L^p(S; E). Computed
/// exactly for Hilbert targets at p = 2, by Gaussian Monte Carlo otherwise.
FubiniComparison gamma_fubini_compare(std::span<const WeightedOperator> samples, double p,
                                      std::size_t n_samples, std::uint64_t seed,
                                      NormalMethod method = NormalMethod::box_muller,
                                      Exec exec = Exec::parallel);

}  // namespace gammaflow
