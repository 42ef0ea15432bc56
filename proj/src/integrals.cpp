#include "gammaflow/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gammaflow/errors.hpp"

namespace gammaflow {

namespace {

void check_compatible(const ElementaryProcess& phi, const PathBundle& bundle) {
    if (!(phi.grid() == bundle.grid()))
        throw InputError("process grid does not match the path bundle grid");
    if (phi.hilbert().dim != bundle.d_h())
        throw InputError("process d_H does not match the path bundle d_H");
}

std::vector<double>& scratch(std::size_t n) {
    thread_local std::vector<double> buf;
    if (buf.size() < n) buf.resize(n);
    return buf;
}

/// y += C * dw for one bin, C row-major d_E x d_H; only coordinates < k_max.
inline void accumulate(const double* c, const double* dw, std::size_t d_e, std::size_t d_h,
                       std::size_t k_max, double* y) {
    for (std::size_t r = 0; r < d_e; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < k_max; ++k) acc += c[r * d_h + k] * dw[k];
        y[r] += acc;
    }
}

PathValues integrate_against(const ElementaryProcess& phi, const PathBundle& bundle, bool decoupled,
                             std::size_t k_max, Exec exec) {
    check_compatible(phi, bundle);
    const std::size_t d_e = phi.target().dim();
    const std::size_t d_h = phi.hilbert().dim;
    const std::size_t bins = phi.grid().bins();
    PathValues out{d_e, std::vector<double>(bundle.paths() * d_e, 0.0)};
    for_each_index(exec, bundle.paths(), [&](std::size_t m) {
        auto& coeff = scratch(phi.coefficient_size());
        phi.coefficients(bundle.path(m), coeff.data());
        const auto noise = decoupled ? bundle.decoupled_path(m) : bundle.path(m);
        double* y = out.data.data() + m * d_e;
        for (std::size_t i = 0; i < bins; ++i)
            accumulate(coeff.data() + i * d_e * d_h, noise.data() + i * d_h, d_e, d_h, k_max, y);
    });
    return out;
}

}  // namespace

std::vector<double> PathValues::norms(const BanachSpaceSpec& e) const {
    if (e.dim() != dim) throw InputError("path values dimension does not match the space");
    std::vector<double> out(paths());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = e.norm_unchecked(data.data() + m * dim);
    return out;
}

GammaOperator represent(const ElementaryProcess& phi, std::size_t m, const PathBundle& bundle) {
    check_compatible(phi, bundle);
    if (m >= bundle.paths()) throw InputError("path index out of range");
    const std::size_t d_e = phi.target().dim();
    const std::size_t d_h = phi.hilbert().dim;
    const std::size_t bins = phi.grid().bins();
    std::vector<double> coeff(phi.coefficient_size());
    phi.coefficients(bundle.path(m), coeff.data());
    const double scale = std::sqrt(phi.grid().dt());
    Matrix a(static_cast<Eigen::Index>(d_e), static_cast<Eigen::Index>(bins * d_h));
    for (std::size_t i = 0; i < bins; ++i)
        for (std::size_t r = 0; r < d_e; ++r)
            for (std::size_t k = 0; k < d_h; ++k)
                a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i * d_h + k)) =
                    scale * coeff[(i * d_e + r) * d_h + k];
    return GammaOperator(std::move(a), phi.grid(), phi.hilbert(), phi.target());
}

Vector integrate_operator(const GammaOperator& x, std::span<const double> path_increments) {
    if (path_increments.size() != x.cols()) throw InputError("path length does not match operator domain");
    const double inv = 1.0 / std::sqrt(x.grid().dt());
    Vector y = Vector::Zero(x.matrix().rows());
    for (Eigen::Index r = 0; r < x.matrix().rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c)
            acc += x.matrix()(r, static_cast<Eigen::Index>(c)) * inv * path_increments[c];
        y[r] = acc;
    }
    return y;
}

PathValues integrate(const ElementaryProcess& phi, const PathBundle& bundle, Exec exec) {
    return integrate_against(phi, bundle, false, phi.hilbert().dim, exec);
}

PathValues integrate_decoupled(const ElementaryProcess& phi, const PathBundle& bundle, Exec exec) {
    return integrate_against(phi, bundle, true, phi.hilbert().dim, exec);
}

PathValues series_expansion(const ElementaryProcess& phi, const PathBundle& bundle, std::size_t terms,
                            Exec exec) {
    if (terms < 1 || terms > phi.hilbert().dim)
        throw InputError("series expansion needs 1 <= K <= d_H, got K = " + std::to_string(terms));
    return integrate_against(phi, bundle, false, terms, exec);
}

PathValues IntegralProcess::final_values() const {
    std::vector<std::size_t> last(paths(), bins);
    return values_at(last);
}

PathValues IntegralProcess::values_at(std::span<const std::size_t> index) const {
    if (index.size() != paths()) throw InputError("one index per path required");
    PathValues out{dim, std::vector<double>(paths() * dim)};
    for (std::size_t m = 0; m < paths(); ++m) {
        if (index[m] > bins) throw InputError("index beyond the grid");
        const auto v = value(m, index[m]);
        std::copy(v.begin(), v.end(), out.data.begin() + static_cast<std::ptrdiff_t>(m * dim));
    }
    return out;
}

IntegralProcess integral_process(const ElementaryProcess& phi, const PathBundle& bundle, Exec exec) {
    check_compatible(phi, bundle);
    const std::size_t d_e = phi.target().dim();
    const std::size_t d_h = phi.hilbert().dim;
    const std::size_t bins = phi.grid().bins();
    const BanachSpaceSpec& e = phi.target();
    IntegralProcess out;
    out.bins = bins;
    out.dim = d_e;
    out.trajectory.assign(bundle.paths() * (bins + 1) * d_e, 0.0);
    out.sup_norm.assign(bundle.paths(), 0.0);
    for_each_index(exec, bundle.paths(), [&](std::size_t m) {
        auto& coeff = scratch(phi.coefficient_size());
        phi.coefficients(bundle.path(m), coeff.data());
        const auto noise = bundle.path(m);
        double* traj = out.trajectory.data() + m * (bins + 1) * d_e;
        double sup = 0.0;
        for (std::size_t i = 0; i < bins; ++i) {
            double* next = traj + (i + 1) * d_e;
            std::copy_n(traj + i * d_e, d_e, next);
            accumulate(coeff.data() + i * d_e * d_h, noise.data() + i * d_h, d_e, d_h, d_h, next);
            sup = std::max(sup, e.norm_unchecked(next));
        }
        out.sup_norm[m] = sup;
    });
    return out;
}

void validate(const StoppingTime& tau, const PathBundle& bundle) {
    if (tau.index.size() != bundle.paths())
        throw InputError("stopping time has " + std::to_string(tau.index.size()) + " entries for " +
                         std::to_string(bundle.paths()) + " paths");
    for (std::size_t v : tau.index)
        if (v > bundle.grid().bins()) throw InputError("stopping index beyond N_t");
}

StoppingTime threshold_stopping(const IntegralProcess& process, const BanachSpaceSpec& e, double level) {
    if (e.dim() != process.dim) throw InputError("space does not match the integral process");
    StoppingTime tau;
    tau.index.assign(process.paths(), process.bins);
    for (std::size_t m = 0; m < process.paths(); ++m)
        for (std::size_t i = 0; i <= process.bins; ++i)
            if (e.norm_unchecked(process.value(m, i).data()) >= level) {
                tau.index[m] = i;
                break;
            }
    return tau;
}

StoppingTime constant_stopping(std::size_t paths, std::size_t index) {
    return StoppingTime{std::vector<std::size_t>(paths, index)};
}

StoppedIntegral stop_and_truncate(const ElementaryProcess& phi, const PathBundle& bundle,
                                  const StoppingTime& tau, Exec exec) {
    validate(tau, bundle);
    const IntegralProcess process = integral_process(phi, bundle, exec);
    StoppedIntegral out;
    out.stopped = process.values_at(tau.index);
    out.operators.reserve(bundle.paths());
    for (std::size_t m = 0; m < bundle.paths(); ++m)
        out.operators.push_back(truncate_bins(represent(phi, m, bundle), tau.index[m]));
    return out;
}

double stopped_identity_error(const ElementaryProcess& phi, const PathBundle& bundle,
                              const StoppingTime& tau, Exec exec) {
    validate(tau, bundle);
    const IntegralProcess process = integral_process(phi, bundle, exec);
    std::vector<double> err(bundle.paths(), 0.0);
    for_each_index(exec, bundle.paths(), [&](std::size_t m) {
        const GammaOperator stopped = truncate_bins(represent(phi, m, bundle), tau.index[m]);
        const Vector lhs = integrate_operator(stopped, bundle.path(m));
        const auto rhs = process.value(m, tau.index[m]);
        double worst = 0.0;
        for (std::size_t r = 0; r < rhs.size(); ++r)
            worst = std::max(worst, std::abs(lhs[static_cast<Eigen::Index>(r)] - rhs[r]));
        err[m] = worst;
    });
    return err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
}

StoppingTime localizing_times(const ElementaryProcess& phi, const PathBundle& bundle, double level,
                              const GammaEvaluator& gamma, Exec exec) {
    check_compatible(phi, bundle);
    const std::size_t bins = phi.grid().bins();
    StoppingTime tau;
    tau.index.assign(bundle.paths(), bins);
    for_each_index(exec, bundle.paths(), [&](std::size_t m) {
        const GammaOperator x = represent(phi, m, bundle);
        const auto profile = gamma.truncation_profile(x.matrix(), phi.hilbert().dim);
        for (std::size_t i = 0; i <= bins; ++i)
            if (profile[i] >= level) {
                tau.index[m] = i;
                break;
            }
    });
    return tau;
}

std::vector<double> represented_norms(const ElementaryProcess& phi, const PathBundle& bundle,
                                      const GammaEvaluator& gamma, Exec exec) {
    check_compatible(phi, bundle);
    std::vector<double> out(bundle.paths());
    for_each_index(exec, bundle.paths(),
                   [&](std::size_t m) { out[m] = gamma.norm(represent(phi, m, bundle).matrix()); });
    return out;
}

}  // namespace gammaflow
