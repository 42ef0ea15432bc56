#pragma once

#include <cmath>
#include <vector>

#include "gammaflow/space.hpp"

namespace gftest {

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Vector with entries s * (k + 1) * (-1)^k.
inline std::vector<double> ramp(std::size_t n, double s = 1.0) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = s * static_cast<double>(k + 1) * (k % 2 ? -1.0 : 1.0);
    return v;
}

}  // namespace gftest
