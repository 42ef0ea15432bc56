#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "gammaflow/space.hpp"

namespace gammaflow {

/// Read access to one path's increments restricted to bins < limit. Rules
/// only ever see this view, so a coefficient can never read the present or
/// the future.
class PastView {
public:
    PastView(std::span<const double> increments, std::size_t d_h, std::size_t limit)
        : data_(increments), d_h_(d_h), limit_(limit) {}

    std::size_t limit() const { return limit_; }
    /// Increment on bin `bin` < limit, coordinate k. Throws InputError otherwise.
    double increment(std::size_t bin, std::size_t k) const;
    /// W_H(t_limit) h_k.
    double position(std::size_t k) const;

private:
    std::span<const double> data_;
    std::size_t d_h_;
    std::size_t limit_;
};

struct ConstantRule {
    Matrix value;  // d_E x d_H
};

/// Disjoint events A_m = { thresholds[m-1] <= W_H(t_start) h_coord < thresholds[m] }
/// (open ends at the extremes), one coefficient matrix per event.
struct IndicatorRule {
    std::size_t coord = 0;
    std::vector<double> thresholds;  // strictly increasing
    std::vector<Matrix> values;      // thresholds.size() + 1 entries
};

/// base + slope * (increment on a fixed earlier bin, coordinate coord).
struct LinearPastRule {
    std::size_t bin = 0;
    std::size_t coord = 0;
    Matrix base;
    Matrix slope;
};

using CoefficientRule = std::variant<ConstantRule, IndicatorRule, LinearPastRule>;

/// Grid-aligned elementary adapted process. Interval n covers bins
/// [breaks[n], breaks[n+1]); its coefficient is a function of increments on
/// bins < breaks[n] only.
class ElementaryProcess {
public:
    ElementaryProcess(TimeGrid grid, HilbertSpec h, BanachSpaceSpec e, std::vector<std::size_t> breaks,
                      std::vector<CoefficientRule> rules);

    /// Partition given as times 0 = t_0 < ... < t_N = T; each must be a
    /// multiple of dt (to 1e-9 relative), otherwise InputError.
    static ElementaryProcess from_times(TimeGrid grid, HilbertSpec h, BanachSpaceSpec e,
                                        std::span<const double> times,
                                        std::vector<CoefficientRule> rules);
    /// Constant coefficient on all of [0, T].
    static ElementaryProcess constant(TimeGrid grid, HilbertSpec h, BanachSpaceSpec e, Matrix value);

    const TimeGrid& grid() const { return grid_; }
    const HilbertSpec& hilbert() const { return h_; }
    const BanachSpaceSpec& target() const { return e_; }
    const std::vector<std::size_t>& breaks() const { return breaks_; }
    const std::vector<CoefficientRule>& rules() const { return rules_; }
    std::size_t intervals() const { return rules_.size(); }
    std::size_t interval_of_bin(std::size_t bin) const;
    /// True when every rule is constant.
    bool deterministic() const;

    /// Coefficient matrix of interval n, row-major into out[d_E * d_H].
    void interval_coefficient(std::size_t n, const PastView& past, double* out) const;

    /// Coefficients for every bin of one path, row-major into
    /// out[bins * d_E * d_H].
    void coefficients(std::span<const double> path_increments, double* out) const;
    std::size_t coefficient_size() const { return grid_.bins() * e_.dim() * h_.dim; }

private:
    TimeGrid grid_;
    HilbertSpec h_;
    BanachSpaceSpec e_;
    std::vector<std::size_t> breaks_;
    std::vector<CoefficientRule> rules_;
};

}  // namespace gammaflow
