#include "gammaflow/generators.hpp"

#include <algorithm>
#include <cmath>

namespace gammaflow {

namespace {

Matrix normal_matrix(Stream& s, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = s.normal();
    return m;
}

Matrix integer_matrix(Stream& s, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(s.integer(-3, 3));
    return m;
}

// Up to four intervals; at least two whenever the grid allows it.
std::vector<std::size_t> random_breaks(Stream& s, std::size_t bins) {
    std::vector<std::size_t> breaks{0};
    if (bins >= 2) {
        const auto extra = static_cast<std::size_t>(s.integer(1, static_cast<std::int64_t>(std::min<std::size_t>(3, bins - 1))));
        std::vector<std::size_t> interior;
        while (interior.size() < extra) {
            const auto b = static_cast<std::size_t>(s.integer(1, static_cast<std::int64_t>(bins - 1)));
            if (std::find(interior.begin(), interior.end(), b) == interior.end()) interior.push_back(b);
        }
        std::sort(interior.begin(), interior.end());
        breaks.insert(breaks.end(), interior.begin(), interior.end());
    }
    breaks.push_back(bins);
    return breaks;
}

enum class RuleClass { indicator, linear_past, constant };

template <class MatrixFn, class ThresholdFn, class SlopeFn>
ElementaryProcess build_adapted(const TimeGrid& grid, const HilbertSpec& h, const BanachSpaceSpec& e, Stream& s,
                                std::size_t index, MatrixFn draw, ThresholdFn threshold, SlopeFn slope) {
    const auto breaks = random_breaks(s, grid.bins());
    std::vector<CoefficientRule> rules;
    rules.push_back(ConstantRule{draw()});
    for (std::size_t n = 1; n + 1 < breaks.size(); ++n) {
        const auto cls = static_cast<RuleClass>((index + n - 1) % 3);
        const std::size_t start = breaks[n];
        switch (cls) {
        case RuleClass::constant:
            rules.push_back(ConstantRule{draw()});
            break;
        case RuleClass::indicator: {
            IndicatorRule r;
            r.coord = static_cast<std::size_t>(s.integer(0, static_cast<std::int64_t>(h.dim - 1)));
            r.thresholds.push_back(threshold(start));
            r.values.push_back(draw());
            r.values.push_back(draw());
            rules.push_back(std::move(r));
            break;
        }
        case RuleClass::linear_past: {
            LinearPastRule r;
            r.bin = static_cast<std::size_t>(s.integer(0, static_cast<std::int64_t>(start - 1)));
            r.coord = static_cast<std::size_t>(s.integer(0, static_cast<std::int64_t>(h.dim - 1)));
            r.base = draw();
            r.slope = slope();
            rules.push_back(std::move(r));
            break;
        }
        }
    }
    return ElementaryProcess(grid, h, e, breaks, std::move(rules));
}

}  // namespace

std::string generator_version(NormalMethod method) { return "v1;normal=" + to_string(method); }

ElementaryProcess random_deterministic_process(const TimeGrid& grid, const HilbertSpec& h,
                                               const BanachSpaceSpec& e, std::uint64_t seed,
                                               std::size_t index) {
    Stream s(seed, Purpose::process_generator, index);
    const auto breaks = random_breaks(s, grid.bins());
    std::vector<CoefficientRule> rules;
    for (std::size_t n = 0; n + 1 < breaks.size(); ++n) rules.push_back(ConstantRule{normal_matrix(s, e.dim(), h.dim)});
    return ElementaryProcess(grid, h, e, breaks, std::move(rules));
}

ElementaryProcess random_adapted_process(const TimeGrid& grid, const HilbertSpec& h,
                                         const BanachSpaceSpec& e, std::uint64_t seed, std::size_t index) {
    // Separate id range from the deterministic family.
    Stream s(seed, Purpose::process_generator, (std::uint64_t{1} << 40) | index);
    const double inv_sqrt_dt = 1.0 / std::sqrt(grid.dt());
    return build_adapted(
        grid, h, e, s, index, [&] { return normal_matrix(s, e.dim(), h.dim); },
        [&](std::size_t start) { return s.normal() * std::sqrt(grid.time(start)); },
        [&] { return Matrix(normal_matrix(s, e.dim(), h.dim) * inv_sqrt_dt); });
}

ElementaryProcess random_integer_process(const TimeGrid& grid, const HilbertSpec& h,
                                         const BanachSpaceSpec& e, std::uint64_t seed, std::size_t index) {
    Stream s(seed, Purpose::oracle_integrand, index);
    return build_adapted(
        grid, h, e, s, index, [&] { return integer_matrix(s, e.dim(), h.dim); },
        [&](std::size_t) { return static_cast<double>(s.integer(-1, 1)); },
        [&] { return integer_matrix(s, e.dim(), h.dim); });
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::size_t index) {
    Stream s(seed, Purpose::experiment, index);
    return normal_matrix(s, rows, cols);
}

void MartingaleSpec::value(std::span<const double> inc, std::size_t index, double* out) const {
    const std::size_t de = e.dim(), dh = h.dim;
    std::fill(out, out + de * dh, 0.0);
    for (std::size_t i = 0; i < index; ++i)
        for (std::size_t k = 0; k < dh; ++k) {
            const double w = inc[i * dh + k];
            const Matrix& m = b(i, k);
            for (std::size_t j = 0; j < de * dh; ++j) out[j] += m.data()[j] * w;
        }
}

MartingaleSpec random_martingale_spec(const TimeGrid& grid, const HilbertSpec& h, const BanachSpaceSpec& e,
                                      std::uint64_t seed, std::size_t index) {
    Stream s(seed, Purpose::martingale_spec, index);
    MartingaleSpec spec{grid, h, e, {}};
    spec.coefficients.reserve(grid.bins() * h.dim);
    for (std::size_t i = 0; i < grid.bins() * h.dim; ++i) spec.coefficients.push_back(normal_matrix(s, e.dim(), h.dim));
    return spec;
}

}  // namespace gammaflow
