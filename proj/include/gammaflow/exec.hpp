#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <omp.h>

namespace gammaflow {

/// Selects the serial reference loop or the OpenMP loop for a kernel.
/// Both produce bit-identical results: work items write to disjoint slots
/// and every reduction runs afterwards in a fixed order.
enum class Exec { serial, parallel };

template <class F>
void for_each_index(Exec exec, std::size_t n, F&& body) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

/// Fixed-shape pairwise reduction. The association order depends only on
/// the length of the input, never on how the values were produced.
inline double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double mean(std::span<const double> values) {
    return pairwise_sum(values) / static_cast<double>(values.size());
}

/// Sets the OpenMP worker count; 0 leaves the runtime default.
inline void set_workers(int n) {
    if (n > 0) omp_set_num_threads(n);
}

}  // namespace gammaflow
