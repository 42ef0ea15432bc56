#include "gammaflow/worked_examples.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "gammaflow/errors.hpp"
#include "gammaflow/rng.hpp"

namespace gammaflow {

double Example29Result::success_rate(std::size_t n) const {
    if (n < 1 || n > levels) throw InputError("level out of range");
    std::size_t hits = 0;
    for (std::size_t m = 0; m < paths; ++m) hits += successes[m * levels + n - 1];
    return static_cast<double>(hits) / static_cast<double>(paths);
}

double example29_statistic(std::span<const std::uint8_t> xi) {
    double s = 0.0;
    std::size_t k = 0;
    for (std::size_t n = 1; n <= xi.size(); ++n) {
        if (!xi[n - 1]) continue;
        ++k;
        s += static_cast<double>(n) / (static_cast<double>(k) * static_cast<double>(k));
    }
    return s;
}

Vector example29_value(std::span<const std::uint8_t> xi, double t, std::size_t target_dim) {
    if (target_dim < xi.size()) throw InputError("d_E must be at least the number of levels");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(target_dim));
    if (!(t > 0.0) || t > 1.0) return v;
    // t in [2^{-n}, 2^{-n+1})  <=>  n = floor(-log2 t) + 1
    const auto n = static_cast<std::size_t>(std::floor(-std::log2(t))) + 1;
    if (n > xi.size() || !xi[n - 1]) return v;
    v[static_cast<Eigen::Index>(n - 1)] =
        std::sqrt(static_cast<double>(n)) * std::pow(2.0, static_cast<double>(n) / 2.0);
    return v;
}

double example29_statistic_by_quadrature(std::span<const std::uint8_t> xi) {
    const std::size_t levels = xi.size();
    Vector x = Vector::Zero(static_cast<Eigen::Index>(levels));
    std::size_t k = 0;
    for (std::size_t n = 1; n <= levels; ++n)
        if (xi[n - 1]) {
            ++k;
            x[static_cast<Eigen::Index>(n - 1)] = 1.0 / static_cast<double>(k);
        }
    // phi is constant on each dyadic piece, so midpoint evaluation is exact.
    double total = 0.0;
    for (std::size_t n = 1; n <= levels; ++n) {
        const double left = std::ldexp(1.0, -static_cast<int>(n));
        const double width = left;
        const Vector phi = example29_value(xi, left + 0.5 * width, levels);
        const double pair = phi.dot(x);
        total += width * pair * pair;
    }
    return total;
}

Example29Result example29_process(std::size_t levels, const PathBundle& bundle, std::size_t target_dim) {
    if (bundle.grid().horizon() != 1.0) throw InputError("the dyadic example lives on [0, 1]; T must be 1");
    if (levels < 1) throw InputError("need at least one level");
    if (target_dim < levels) throw InputError("d_E must be at least n_max");
    Example29Result out;
    out.levels = levels;
    out.paths = bundle.paths();
    out.successes.assign(out.paths * levels, 0);
    out.statistic.assign(out.paths, 0.0);
    for (std::size_t m = 0; m < out.paths; ++m) {
        Stream s(bundle.seed(), Purpose::example29, m);
        for (std::size_t n = 1; n <= levels; ++n)
            out.successes[m * levels + n - 1] = s.uniform() < 1.0 / static_cast<double>(n) ? 1 : 0;
        out.statistic[m] = example29_statistic(out.xi(m));
    }
    return out;
}

std::vector<double> CovarianceBrownian::pairing(std::span<const double> xstar) const {
    if (xstar.size() != dim) throw InputError("x* length does not match d_E");
    const std::size_t n = paths() * (bins + 1);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < dim; ++r) acc += positions[j * dim + r] * xstar[r];
        out[j] = acc;
    }
    return out;
}

CovarianceBrownian rkhs_from_covariance(const Matrix& c, const PathBundle& bundle, double tolerance) {
    if (c.rows() != c.cols()) throw InputError("covariance must be square");
    const auto d = static_cast<std::size_t>(c.rows());
    if (d != bundle.d_h()) throw InputError("covariance dimension must equal the bundle's d_H");
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > tolerance)
        throw InputError("covariance is not symmetric");
    const Eigen::MatrixXd dense = c;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -tolerance)
        throw InputError("covariance is not positive semidefinite (eigenvalue " +
                         std::to_string(lambda.minCoeff()) + ")");
    const double cutoff = tolerance * std::max(1.0, lambda.maxCoeff());
    Eigen::VectorXd root(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) root[i] = lambda[i] > cutoff ? std::sqrt(lambda[i]) : 0.0;
    const Eigen::MatrixXd u = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();

    CovarianceBrownian out;
    out.factor = u;
    out.bins = bundle.grid().bins();
    out.dim = d;
    out.positions.assign(bundle.paths() * (out.bins + 1) * d, 0.0);
    for (std::size_t m = 0; m < bundle.paths(); ++m) {
        const auto inc = bundle.path(m);
        std::vector<double> b(d, 0.0);
        for (std::size_t i = 0; i < out.bins; ++i) {
            for (std::size_t k = 0; k < d; ++k) b[k] += inc[i * d + k];
            double* w = out.positions.data() + (m * (out.bins + 1) + i + 1) * d;
            for (std::size_t r = 0; r < d; ++r) {
                double acc = 0.0;
                for (std::size_t k = 0; k < d; ++k) acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) * b[k];
                w[r] = acc;
            }
        }
    }
    return out;
}

}  // namespace gammaflow
