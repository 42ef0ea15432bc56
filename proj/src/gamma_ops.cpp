#include "gammaflow/gamma_ops.hpp"

#include <cmath>
#include <string>

#include "gammaflow/errors.hpp"

namespace gammaflow {

GammaOperator::GammaOperator(Matrix matrix, TimeGrid grid, HilbertSpec h, BanachSpaceSpec e)
    : matrix_(std::move(matrix)), grid_(grid), h_(h), e_(std::move(e)) {
    if (static_cast<std::size_t>(matrix_.rows()) != e_.dim())
        throw InputError("operator has " + std::to_string(matrix_.rows()) +
                         " rows but d_E = " + std::to_string(e_.dim()));
    if (static_cast<std::size_t>(matrix_.cols()) != grid_.bins() * h_.dim)
        throw InputError("operator has " + std::to_string(matrix_.cols()) +
                         " columns but N_t * d_H = " + std::to_string(grid_.bins() * h_.dim));
}

GammaOperator GammaOperator::zero(const TimeGrid& grid, const HilbertSpec& h,
                                  const BanachSpaceSpec& e) {
    return GammaOperator(Matrix::Zero(static_cast<Eigen::Index>(e.dim()),
                                      static_cast<Eigen::Index>(grid.bins() * h.dim)),
                         grid, h, e);
}

Vector GammaOperator::apply(const L2StepFunction& f) const {
    if (static_cast<std::size_t>(f.coeffs.rows()) != grid_.bins() ||
        static_cast<std::size_t>(f.coeffs.cols()) != h_.dim)
        throw InputError("step function shape does not match the operator domain");
    return matrix_ * f.flat();
}

L2StepFunction GammaOperator::adjoint_apply(std::span<const double> xstar) const {
    if (xstar.size() != e_.dim()) throw InputError("x* length does not match d_E");
    Vector weighted(static_cast<Eigen::Index>(xstar.size()));
    for (std::size_t s = 0; s < xstar.size(); ++s) weighted[static_cast<Eigen::Index>(s)] = e_.weight(s) * xstar[s];
    const Vector flat = matrix_.transpose() * weighted;
    L2StepFunction out = L2StepFunction::zero(grid_, h_);
    for (Eigen::Index j = 0; j < flat.size(); ++j) out.coeffs.data()[j] = flat[j];
    return out;
}

double frobenius(const Matrix& m) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) s += m.data()[i] * m.data()[i];
    return std::sqrt(s);
}

double gamma_norm_exact(const GammaOperator& r) {
    if (r.target().variant() != SpaceVariant::hilbert)
        throw UnsupportedMethod("exact gamma norm needs a Hilbert target, got " +
                                r.target().describe());
    return frobenius(r.matrix());
}

GaussianSeries::GaussianSeries(std::size_t dim, std::size_t samples, std::uint64_t seed,
                               NormalMethod method, Exec exec)
    : draws_(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(dim)) {
    for_each_index(exec, samples, [&](std::size_t j) {
        Stream s(seed, Purpose::gamma_series, j, method);
        double* row = draws_.data() + j * dim;
        for (std::size_t c = 0; c < dim; ++c) row[c] = s.normal();
    });
}

std::vector<double> GaussianSeries::squared_norms(const Matrix& a, const BanachSpaceSpec& e, Exec exec) const {
    const auto cols = static_cast<std::size_t>(a.cols());
    if (cols > dim()) throw InputError("operator has more columns than the Gaussian series");
    if (static_cast<std::size_t>(a.rows()) != e.dim()) throw InputError("operator rows != d_E");
    // One product for all draws; row j of y is A g_j.
    const Matrix y = draws_.leftCols(a.cols()) * a.transpose();
    std::vector<double> out(samples());
    for_each_index(exec, samples(), [&](std::size_t j) {
        const double n = e.norm_unchecked(y.data() + j * e.dim());
        out[j] = n * n;
    });
    return out;
}

GammaNormEstimate norm_from_squares(std::span<const double> squares) {
    const std::size_t n = squares.size();
    if (n < 2) throw InputError("need at least two samples");
    const double m = mean(squares);
    std::vector<double> dev(n);
    for (std::size_t j = 0; j < n; ++j) dev[j] = (squares[j] - m) * (squares[j] - m);
    const double var = pairwise_sum(dev) / static_cast<double>(n - 1);
    const double se_m = std::sqrt(var / static_cast<double>(n));
    GammaNormEstimate est;
    est.value = std::sqrt(m);
    est.standard_error = m < 1e-12 ? se_m : se_m / (2.0 * est.value);
    est.samples = n;
    est.method = NormMethod::gaussian_mc;
    return est;
}

GammaNormEstimate GaussianSeries::estimate(const Matrix& a, const BanachSpaceSpec& e, Exec exec) const {
    const auto sq = squared_norms(a, e, exec);
    return norm_from_squares(sq);
}

GammaEvaluator::GammaEvaluator(BanachSpaceSpec target, std::size_t dim, std::size_t mc_samples,
                               std::uint64_t seed, NormalMethod method)
    : target_(std::move(target)) {
    if (target_.variant() != SpaceVariant::hilbert)
        series_.emplace(dim, mc_samples, seed, method, Exec::serial);
}

double GammaEvaluator::norm(const Matrix& a) const {
    if (!series_) return frobenius(a);
    return series_->estimate(a, target_).value;
}

std::vector<double> GammaEvaluator::truncation_profile(const Matrix& a, std::size_t d_h) const {
    const auto cols = static_cast<std::size_t>(a.cols());
    if (d_h == 0 || cols % d_h != 0) throw InputError("column count is not a multiple of d_H");
    const std::size_t bins = cols / d_h;
    std::vector<double> out(bins + 1, 0.0);
    if (!series_) {
        double acc = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
            for (Eigen::Index r = 0; r < a.rows(); ++r)
                for (std::size_t k = 0; k < d_h; ++k) {
                    const double v = a(r, static_cast<Eigen::Index>(b * d_h + k));
                    acc += v * v;
                }
            out[b + 1] = std::sqrt(acc);
        }
        return out;
    }
    // Running partial sums of the series, one draw at a time.
    const GaussianSeries& gs = *series_;
    if (cols > gs.dim()) throw InputError("operator has more columns than the Gaussian series");
    std::vector<std::vector<double>> squares(bins + 1, std::vector<double>(gs.samples(), 0.0));
    const Matrix& draws = gs.draws();
    Vector y(a.rows());
    for (std::size_t j = 0; j < gs.samples(); ++j) {
        y.setZero();
        for (std::size_t b = 0; b < bins; ++b) {
            const auto first = static_cast<Eigen::Index>(b * d_h);
            const auto width = static_cast<Eigen::Index>(d_h);
            y.noalias() += a.middleCols(first, width) *
                           draws.row(static_cast<Eigen::Index>(j)).segment(first, width).transpose();
            const double n = target_.norm_unchecked(y.data());
            squares[b + 1][j] = n * n;
        }
    }
    for (std::size_t b = 1; b <= bins; ++b) out[b] = std::sqrt(mean(squares[b]));
    return out;
}

GammaNormEstimate gamma_norm_mc(const GammaOperator& r, std::size_t n_samples, std::uint64_t seed,
                                NormalMethod method, Exec exec) {
    if (n_samples < 2) throw InputError("gamma_norm_mc needs n_samples >= 2");
    const std::size_t dim = r.cols();
    const Matrix& a = r.matrix();
    const BanachSpaceSpec& e = r.target();
    std::vector<double> squares(n_samples);
    for_each_index(exec, n_samples, [&](std::size_t j) {
        Stream s(seed, Purpose::gamma_series, j, method);
        Vector g(static_cast<Eigen::Index>(dim));
        for (std::size_t c = 0; c < dim; ++c) g[static_cast<Eigen::Index>(c)] = s.normal();
        const Vector y = a * g;
        const double n = e.norm_unchecked(y.data());
        squares[j] = n * n;
    });
    return norm_from_squares(squares);
}

double square_function_norm(const GammaOperator& r) {
    const BanachSpaceSpec& e = r.target();
    if (e.variant() != SpaceVariant::lq)
        throw UnsupportedMethod("square function norm needs an L^q target, got " + e.describe());
    // sum_i dt sum_k phi(t_i,s)[k]^2 with phi = dt^{-1/2} A collapses to the
    // squared row norm of A.
    Vector pointwise(static_cast<Eigen::Index>(e.dim()));
    for (Eigen::Index s = 0; s < r.matrix().rows(); ++s) {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < r.matrix().cols(); ++c) acc += r.matrix()(s, c) * r.matrix()(s, c);
        pointwise[s] = std::sqrt(acc);
    }
    return e.norm_unchecked(pointwise.data());
}

GammaOperator compose_ideal(const Matrix& b2, const GammaOperator& r, const Matrix& b1,
                            std::optional<BanachSpaceSpec> target) {
    const auto n = static_cast<Eigen::Index>(r.cols());
    if (b1.rows() != n || b1.cols() != n)
        throw InputError("B1 must be a square matrix on step-function coefficients");
    if (b2.cols() != r.matrix().rows()) throw InputError("B2 columns must equal d_E");
    const auto new_dim = static_cast<std::size_t>(b2.rows());
    BanachSpaceSpec spec = target ? *target
                           : new_dim == r.target().dim()
                               ? r.target()
                               : r.target().variant() == SpaceVariant::hilbert
                                     ? BanachSpaceSpec::hilbert(new_dim)
                                     : throw InputError("target spec required for a non-square B2 on an L^q space");
    if (spec.dim() != new_dim) throw InputError("target spec dimension must equal B2 rows");
    Matrix m = b2 * r.matrix() * b1;
    return GammaOperator(std::move(m), r.grid(), r.hilbert(), std::move(spec));
}

GammaOperator truncate_bins(const GammaOperator& r, std::size_t index) {
    if (index > r.grid().bins()) throw InputError("truncation index beyond the grid");
    Matrix m = r.matrix();
    const std::size_t keep = index * r.hilbert().dim;
    for (Eigen::Index c = static_cast<Eigen::Index>(keep); c < m.cols(); ++c) m.col(c).setZero();
    return GammaOperator(std::move(m), r.grid(), r.hilbert(), r.target());
}

GammaOperator truncate_time(const GammaOperator& r, double t) {
    return truncate_bins(r, r.grid().snap(t));
}

GammaOperator right_translate(const GammaOperator& r, double delta) {
    if (!(delta >= 0.0)) throw InputError("translation delta must be nonnegative");
    const std::size_t bins = r.grid().bins();
    const double steps = std::floor(delta / r.grid().dt() + 0.5);
    const std::size_t shift = steps >= static_cast<double>(bins) ? bins : static_cast<std::size_t>(steps);
    const std::size_t dh = r.hilbert().dim;
    Matrix m = Matrix::Zero(r.matrix().rows(), r.matrix().cols());
    for (std::size_t j = shift; j < bins; ++j)
        m.middleCols(static_cast<Eigen::Index>(j * dh), static_cast<Eigen::Index>(dh)) =
            r.matrix().middleCols(static_cast<Eigen::Index>((j - shift) * dh), static_cast<Eigen::Index>(dh));
    return GammaOperator(std::move(m), r.grid(), r.hilbert(), r.target());
}

FubiniComparison gamma_fubini_compare(std::span<const WeightedOperator> samples, double p,
                                      std::size_t n_samples, std::uint64_t seed,
                                      NormalMethod method, Exec exec) {
    if (samples.empty()) throw InputError("gamma_fubini_compare needs at least one operator");
    if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p must lie in [1, ∞)");
    double total = 0.0;
    for (const auto& s : samples) {
        if (!(s.weight >= 0.0)) throw InputError("probability weights must be nonnegative");
        total += s.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("probability weights must sum to 1");
    const GammaOperator& first = samples.front().op;
    for (const auto& s : samples)
        if (!(s.op.grid() == first.grid()) || !(s.op.hilbert() == first.hilbert()) ||
            !(s.op.target() == first.target()))
            throw InputError("all operators must share grid, H and E");

    FubiniComparison out;
    const bool hilbert = first.target().variant() == SpaceVariant::hilbert;
    if (hilbert && p == 2.0) {
        double acc = 0.0;
        for (const auto& s : samples) {
            const double f = frobenius(s.op.matrix());
            acc += s.weight * f * f;
        }
        out.lhs = out.rhs = std::sqrt(acc);
        out.exact = true;
        return out;
    }

    const GaussianSeries series(first.cols(), n_samples, seed, method, exec);
    // lhs: (sum_w ||X_w||_gamma^p)^{1/p}, per-operator norms on common draws.
    double lhs_acc = 0.0;
    double lhs_var = 0.0;
    for (const auto& s : samples) {
        const GammaNormEstimate est = hilbert
            ? GammaNormEstimate{frobenius(s.op.matrix()), 0.0, 0, NormMethod::exact_hilbert}
            : series.estimate(s.op.matrix(), s.op.target());
        lhs_acc += s.weight * std::pow(est.value, p);
        // d/dv of w v^p
        const double slope = s.weight * p * std::pow(est.value, p - 1.0);
        lhs_var += slope * slope * est.standard_error * est.standard_error;
    }
    out.lhs = std::pow(lhs_acc, 1.0 / p);
    out.lhs_stderr = lhs_acc > 0.0 ? std::pow(lhs_acc, 1.0 / p - 1.0) / p * std::sqrt(lhs_var) : 0.0;

    // rhs: Gaussian series in L^p(S; E) with the mixed norm.
    std::vector<std::vector<double>> per_op;
    per_op.reserve(samples.size());
    for (const auto& s : samples) per_op.push_back(series.squared_norms(s.op.matrix(), s.op.target()));
    std::vector<double> squares(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
        double acc = 0.0;
        for (std::size_t w = 0; w < samples.size(); ++w)
            acc += samples[w].weight * std::pow(per_op[w][j], p / 2.0);
        const double nrm = std::pow(acc, 1.0 / p);
        squares[j] = nrm * nrm;
    }
    const GammaNormEstimate rhs = norm_from_squares(squares);
    out.rhs = rhs.value;
    out.rhs_stderr = rhs.standard_error;
    return out;
}

}  // namespace gammaflow
