#include "gammaflow/process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gammaflow/errors.hpp"

namespace gammaflow {

double PastView::increment(std::size_t bin, std::size_t k) const {
    if (bin >= limit_) throw InputError("coefficient rule read a non-past increment");
    if (k >= d_h_) throw InputError("coordinate out of range");
    return data_[bin * d_h_ + k];
}

double PastView::position(std::size_t k) const {
    if (k >= d_h_) throw InputError("coordinate out of range");
    double w = 0.0;
    for (std::size_t b = 0; b < limit_; ++b) w += data_[b * d_h_ + k];
    return w;
}

namespace {
void check_shape(const Matrix& m, const BanachSpaceSpec& e, const HilbertSpec& h) {
    if (static_cast<std::size_t>(m.rows()) != e.dim() || static_cast<std::size_t>(m.cols()) != h.dim)
        throw InputError("coefficient matrix must be d_E x d_H");
}
}  // namespace

ElementaryProcess::ElementaryProcess(TimeGrid grid, HilbertSpec h, BanachSpaceSpec e,
                                     std::vector<std::size_t> breaks,
                                     std::vector<CoefficientRule> rules)
    : grid_(grid), h_(h), e_(std::move(e)), breaks_(std::move(breaks)), rules_(std::move(rules)) {
    if (breaks_.size() < 2 || breaks_.front() != 0 || breaks_.back() != grid_.bins())
        throw InputError("partition must run from bin 0 to N_t");
    for (std::size_t n = 1; n < breaks_.size(); ++n)
        if (breaks_[n] <= breaks_[n - 1]) throw InputError("partition must be strictly increasing");
    if (rules_.size() + 1 != breaks_.size())
        throw InputError("need exactly one coefficient rule per interval");
    for (std::size_t n = 0; n < rules_.size(); ++n) {
        const std::size_t start = breaks_[n];
        std::visit(
            [&](const auto& rule) {
                using R = std::decay_t<decltype(rule)>;
                if constexpr (std::is_same_v<R, ConstantRule>) {
                    check_shape(rule.value, e_, h_);
                } else if constexpr (std::is_same_v<R, IndicatorRule>) {
                    if (rule.coord >= h_.dim) throw InputError("indicator coordinate out of range");
                    if (rule.values.size() != rule.thresholds.size() + 1)
                        throw InputError("indicator rule needs one matrix per event");
                    for (std::size_t j = 1; j < rule.thresholds.size(); ++j)
                        if (!(rule.thresholds[j] > rule.thresholds[j - 1]))
                            throw InputError("indicator thresholds must increase");
                    for (const auto& m : rule.values) check_shape(m, e_, h_);
                } else {
                    if (rule.coord >= h_.dim) throw InputError("linear rule coordinate out of range");
                    if (rule.bin >= start)
                        throw InputError("linear rule on interval " + std::to_string(n) +
                                         " reads bin " + std::to_string(rule.bin) +
                                         ", which is not strictly before bin " + std::to_string(start));
                    check_shape(rule.base, e_, h_);
                    check_shape(rule.slope, e_, h_);
                }
            },
            rules_[n]);
    }
}

ElementaryProcess ElementaryProcess::from_times(TimeGrid grid, HilbertSpec h, BanachSpaceSpec e,
                                                std::span<const double> times,
                                                std::vector<CoefficientRule> rules) {
    std::vector<std::size_t> breaks;
    breaks.reserve(times.size());
    for (double t : times) {
        const double x = t / grid.dt();
        const double r = std::round(x);
        if (!(t >= 0.0 && t <= grid.horizon() * (1.0 + 1e-12)) || std::abs(x - r) > 1e-9 * std::max(1.0, x))
            throw InputError("partition point " + std::to_string(t) + " is not aligned to the grid");
        breaks.push_back(static_cast<std::size_t>(r));
    }
    return ElementaryProcess(grid, h, std::move(e), std::move(breaks), std::move(rules));
}

ElementaryProcess ElementaryProcess::constant(TimeGrid grid, HilbertSpec h, BanachSpaceSpec e,
                                              Matrix value) {
    std::vector<CoefficientRule> rules;
    rules.emplace_back(ConstantRule{std::move(value)});
    return ElementaryProcess(grid, h, std::move(e), {0, grid.bins()}, std::move(rules));
}

std::size_t ElementaryProcess::interval_of_bin(std::size_t bin) const {
    if (bin >= grid_.bins()) throw InputError("bin out of range");
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), bin);
    return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

bool ElementaryProcess::deterministic() const {
    return std::all_of(rules_.begin(), rules_.end(),
                       [](const auto& r) { return std::holds_alternative<ConstantRule>(r); });
}

void ElementaryProcess::interval_coefficient(std::size_t n, const PastView& past, double* out) const {
    const std::size_t size = e_.dim() * h_.dim;
    std::visit(
        [&](const auto& rule) {
            using R = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<R, ConstantRule>) {
                std::copy_n(rule.value.data(), size, out);
            } else if constexpr (std::is_same_v<R, IndicatorRule>) {
                const double w = past.position(rule.coord);
                const auto event = static_cast<std::size_t>(
                    std::upper_bound(rule.thresholds.begin(), rule.thresholds.end(), w) -
                    rule.thresholds.begin());
                std::copy_n(rule.values[event].data(), size, out);
            } else {
                const double x = past.increment(rule.bin, rule.coord);
                for (std::size_t j = 0; j < size; ++j)
                    out[j] = rule.base.data()[j] + rule.slope.data()[j] * x;
            }
        },
        rules_[n]);
}

void ElementaryProcess::coefficients(std::span<const double> path_increments, double* out) const {
    if (path_increments.size() != grid_.bins() * h_.dim)
        throw InputError("path length does not match N_t * d_H");
    const std::size_t block = e_.dim() * h_.dim;
    for (std::size_t n = 0; n < rules_.size(); ++n) {
        const PastView past(path_increments, h_.dim, breaks_[n]);
        double* first = out + breaks_[n] * block;
        interval_coefficient(n, past, first);
        for (std::size_t b = breaks_[n] + 1; b < breaks_[n + 1]; ++b)
            std::copy_n(first, block, out + b * block);
    }
}

}  // namespace gammaflow
