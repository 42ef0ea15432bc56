#include "gammaflow/space.hpp"

#include <cmath>
#include <sstream>

#include "gammaflow/errors.hpp"

namespace gammaflow {

TimeGrid::TimeGrid(double horizon, std::size_t bins)
    : horizon_(horizon), bins_(bins), dt_(horizon / static_cast<double>(bins)) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InputError("time grid horizon must be positive and finite");
    if (bins < 1) throw InputError("time grid needs at least one bin");
}

double TimeGrid::time(std::size_t index) const {
    if (index == bins_) return horizon_;
    return static_cast<double>(index) * dt_;
}

std::size_t TimeGrid::snap(double t) const {
    const double slack = 1e-12 * horizon_;
    if (!(t >= -slack && t <= horizon_ + slack))
        throw InputError("time " + std::to_string(t) + " outside [0, T]");
    const double idx = std::floor(t / dt_ + 0.5);
    if (idx <= 0.0) return 0;
    return std::min(bins_, static_cast<std::size_t>(idx));
}

BanachSpaceSpec::BanachSpaceSpec(SpaceVariant v, std::size_t dim, double q, std::vector<double> w)
    : variant_(v), dim_(dim), q_(q), weights_(std::move(w)) {}

BanachSpaceSpec BanachSpaceSpec::hilbert(std::size_t dim) {
    if (dim < 1) throw InputError("d_E must be positive");
    return BanachSpaceSpec(SpaceVariant::hilbert, dim, 2.0, std::vector<double>(dim, 1.0));
}

BanachSpaceSpec BanachSpaceSpec::lq(std::size_t dim, double q, std::vector<double> weights) {
    if (dim < 1) throw InputError("d_E must be positive");
    if (!(q > 1.0) || !std::isfinite(q)) throw InputError("q must lie in (1, ∞)");
    if (weights.empty()) weights.assign(dim, 1.0);
    if (weights.size() != dim) throw InputError("weights must have d_E entries");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw InputError("weights must be strictly positive");
    return BanachSpaceSpec(SpaceVariant::lq, dim, q, std::move(weights));
}

double BanachSpaceSpec::norm_unchecked(const double* x) const {
    if (variant_ == SpaceVariant::hilbert) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += x[i] * x[i];
        return std::sqrt(s);
    }
    if (q_ == 2.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += weights_[i] * x[i] * x[i];
        return std::sqrt(s);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += weights_[i] * std::pow(std::abs(x[i]), q_);
    return std::pow(s, 1.0 / q_);
}

double BanachSpaceSpec::norm_pow_unchecked(const double* x, double p) const {
    if (p == q_) {
        double s = 0.0;
        if (q_ == 2.0)
            for (std::size_t i = 0; i < dim_; ++i) s += weights_[i] * x[i] * x[i];
        else
            for (std::size_t i = 0; i < dim_; ++i) s += weights_[i] * std::pow(std::abs(x[i]), q_);
        return s;
    }
    return std::pow(norm_unchecked(x), p);
}

std::string BanachSpaceSpec::describe() const {
    std::ostringstream os;
    if (variant_ == SpaceVariant::hilbert)
        os << "hilbert(" << dim_ << ")";
    else
        os << "lq(" << dim_ << ",q=" << q_ << ")";
    return os.str();
}

namespace {
void check_dim(const BanachSpaceSpec& spec, std::size_t n) {
    if (n != spec.dim())
        throw InputError("vector of length " + std::to_string(n) + " does not match d_E = " +
                         std::to_string(spec.dim()));
}
}  // namespace

double banach_norm(const BanachSpaceSpec& spec, std::span<const double> x) {
    check_dim(spec, x.size());
    return spec.norm_unchecked(x.data());
}

double dual_norm(const BanachSpaceSpec& spec, std::span<const double> xstar) {
    check_dim(spec, xstar.size());
    if (spec.variant() == SpaceVariant::hilbert) return spec.norm_unchecked(xstar.data());
    const double r = spec.dual_q();
    double s = 0.0;
    for (std::size_t i = 0; i < xstar.size(); ++i)
        s += spec.weight(i) * std::pow(std::abs(xstar[i]), r);
    return std::pow(s, 1.0 / r);
}

double duality_pair(const BanachSpaceSpec& spec, std::span<const double> x,
                    std::span<const double> xstar) {
    check_dim(spec, x.size());
    check_dim(spec, xstar.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += spec.weight(i) * x[i] * xstar[i];
    return s;
}

L2StepFunction L2StepFunction::zero(const TimeGrid& grid, const HilbertSpec& h) {
    return {Matrix::Zero(static_cast<Eigen::Index>(grid.bins()), static_cast<Eigen::Index>(h.dim))};
}

L2StepFunction L2StepFunction::basis(const TimeGrid& grid, const HilbertSpec& h, std::size_t i,
                                     std::size_t k) {
    if (i >= grid.bins() || k >= h.dim) throw InputError("basis index out of range");
    auto f = zero(grid, h);
    f.coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = 1.0;
    return f;
}

L2StepFunction L2StepFunction::constant(const TimeGrid& grid, std::span<const double> value) {
    const double scale = std::sqrt(grid.dt());
    auto f = zero(grid, HilbertSpec{value.size()});
    for (Eigen::Index i = 0; i < f.coeffs.rows(); ++i)
        for (std::size_t k = 0; k < value.size(); ++k)
            f.coeffs(i, static_cast<Eigen::Index>(k)) = value[k] * scale;
    return f;
}

Vector L2StepFunction::flat() const {
    return Eigen::Map<const Vector>(coeffs.data(), coeffs.size());
}

double l2_inner(const L2StepFunction& f, const L2StepFunction& g, const TimeGrid& grid) {
    if (f.coeffs.rows() != g.coeffs.rows() || f.coeffs.cols() != g.coeffs.cols())
        throw InputError("step functions have different shapes");
    if (static_cast<std::size_t>(f.coeffs.rows()) != grid.bins())
        throw InputError("step function does not match the time grid");
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) s += f.coeffs.data()[i] * g.coeffs.data()[i];
    return s;
}

}  // namespace gammaflow
