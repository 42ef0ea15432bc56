#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gammaflow {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Uniform partition of [0, T] into `bins` intervals I_i = (t_i, t_{i+1}].
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t bins);

    double horizon() const { return horizon_; }
    std::size_t bins() const { return bins_; }
    double dt() const { return dt_; }
    double time(std::size_t index) const;

    /// Nearest grid index to t, rounding half up. Throws InputError when t
    /// lies outside [0, T].
    std::size_t snap(double t) const;

    bool operator==(const TimeGrid&) const = default;

private:
    double horizon_;
    std::size_t bins_;
    double dt_;
};

/// H = R^{d_H} with its standard orthonormal basis.
struct HilbertSpec {
    std::size_t dim = 1;
    bool operator==(const HilbertSpec&) const = default;
};

enum class SpaceVariant { hilbert, lq };

/// The target space E: Euclidean R^d, or L^q over d weighted points.
class BanachSpaceSpec {
public:
    static BanachSpaceSpec hilbert(std::size_t dim);
    /// Empty `weights` means unit weights.
    static BanachSpaceSpec lq(std::size_t dim, double q, std::vector<double> weights = {});

    SpaceVariant variant() const { return variant_; }
    std::size_t dim() const { return dim_; }
    /// Exponent; 2 for the Hilbert variant.
    double q() const { return q_; }
    /// Conjugate exponent q/(q-1).
    double dual_q() const { return q_ / (q_ - 1.0); }
    double weight(std::size_t s) const { return weights_[s]; }
    const std::vector<double>& weights() const { return weights_; }

    /// Norm without the size check; hot loops only.
    double norm_unchecked(const double* x) const;
    /// ||x||^p, avoiding the root when p matches the norm's own exponent.
    double norm_pow_unchecked(const double* x, double p) const;
    std::string describe() const;

    bool operator==(const BanachSpaceSpec&) const = default;

private:
    BanachSpaceSpec(SpaceVariant v, std::size_t dim, double q, std::vector<double> w);

    SpaceVariant variant_;
    std::size_t dim_;
    double q_;
    std::vector<double> weights_;
};

double banach_norm(const BanachSpaceSpec& spec, std::span<const double> x);
/// Norm of x* in E* under the weighted pairing (conjugate exponent for L^q).
double dual_norm(const BanachSpaceSpec& spec, std::span<const double> xstar);
/// <x, x*> = sum_s w_s x_s x*_s.
double duality_pair(const BanachSpaceSpec& spec, std::span<const double> x,
                    std::span<const double> xstar);

/// Element of the step-function subspace of L^2(0,T;H):
/// f = sum_{i,k} c(i,k) dt^{-1/2} 1_{I_i} h_k, so the coefficients are
/// coordinates in an orthonormal basis.
struct L2StepFunction {
    Matrix coeffs;  // bins x d_H

    static L2StepFunction zero(const TimeGrid& grid, const HilbertSpec& h);
    /// Basis element e_{i,k}.
    static L2StepFunction basis(const TimeGrid& grid, const HilbertSpec& h, std::size_t i,
                                std::size_t k);
    /// The function taking the constant value `value` in H on all of [0, T].
    static L2StepFunction constant(const TimeGrid& grid, std::span<const double> value);

    /// Coefficients flattened in (bin, coordinate) order.
    Vector flat() const;
};

double l2_inner(const L2StepFunction& f, const L2StepFunction& g, const TimeGrid& grid);

}  // namespace gammaflow
