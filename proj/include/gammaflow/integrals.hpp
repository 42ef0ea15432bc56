#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gammaflow/exec.hpp"
#include "gammaflow/gamma_ops.hpp"
#include "gammaflow/paths.hpp"
#include "gammaflow/process.hpp"

namespace gammaflow {

/// One E-valued result per path, row-major [path][coordinate].
struct PathValues {
    std::size_t dim = 0;
    std::vector<double> data;

    std::size_t paths() const { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> row(std::size_t m) const { return {data.data() + m * dim, dim}; }
    std::span<double> row(std::size_t m) { return {data.data() + m * dim, dim}; }
    /// ||row m|| in the given space, for every path.
    std::vector<double> norms(const BanachSpaceSpec& e) const;
};

/// The operator X(omega_m) represented by Phi on path m: column (i,k) is
/// sqrt(dt) * Phi(bin i) h_k.
GammaOperator represent(const ElementaryProcess& phi, std::size_t m, const PathBundle& bundle);

/// Pathwise integral of an operator whose representing process is constant
/// on bins: sum_{i,k} A(:, (i,k)) dW[i][k] / sqrt(dt).
Vector integrate_operator(const GammaOperator& x, std::span<const double> path_increments);

/// sum_i Phi(bin i) dW[m][i] for every path.
PathValues integrate(const ElementaryProcess& phi, const PathBundle& bundle, Exec exec = Exec::parallel);

/// Coefficients from the original increments, noise from the decoupled copy.
PathValues integrate_decoupled(const ElementaryProcess& phi, const PathBundle& bundle,
                               Exec exec = Exec::parallel);

/// Running partial sums I(t_0 = 0), I(t_1), ..., I(t_N) per path, with the
/// per-path maximum of ||I(t_i)|| over the grid.
struct IntegralProcess {
    std::size_t bins = 0;
    std::size_t dim = 0;
    std::vector<double> trajectory;  // paths x (bins + 1) x dim
    std::vector<double> sup_norm;    // paths

    std::size_t paths() const { return sup_norm.size(); }
    std::span<const double> value(std::size_t m, std::size_t index) const {
        return {trajectory.data() + (m * (bins + 1) + index) * dim, dim};
    }
    PathValues final_values() const;
    PathValues values_at(std::span<const std::size_t> index) const;
};

IntegralProcess integral_process(const ElementaryProcess& phi, const PathBundle& bundle,
                                 Exec exec = Exec::parallel);

/// sum_{k < K} int Phi h_k dW_H h_k for every path; 1 <= K <= d_H.
PathValues series_expansion(const ElementaryProcess& phi, const PathBundle& bundle, std::size_t terms,
                            Exec exec = Exec::parallel);

/// Grid-valued stopping time, one index in {0, ..., N_t} per path.
/// {tau <= i} may depend only on increments of bins < i.
struct StoppingTime {
    std::vector<std::size_t> index;
};

void validate(const StoppingTime& tau, const PathBundle& bundle);

/// First grid index where ||I(t_i)|| >= level, N_t when never.
StoppingTime threshold_stopping(const IntegralProcess& process, const BanachSpaceSpec& e, double level);

/// tau identically equal to `index`.
StoppingTime constant_stopping(std::size_t paths, std::size_t index);

struct StoppedIntegral {
    PathValues stopped;                   // I(t_{tau[m]}) per path
    std::vector<GammaOperator> operators; // xi_X(tau) per path
};

StoppedIntegral stop_and_truncate(const ElementaryProcess& phi, const PathBundle& bundle,
                                  const StoppingTime& tau, Exec exec = Exec::parallel);

/// max over paths and coordinates of |I(xi_X(tau)) - I_tau|, computed
/// without materializing every operator.
double stopped_identity_error(const ElementaryProcess& phi, const PathBundle& bundle,
                              const StoppingTime& tau, Exec exec = Exec::parallel);

/// tau_n = first grid index where ||xi_X(t_i)||_gamma >= level; N_t when never.
StoppingTime localizing_times(const ElementaryProcess& phi, const PathBundle& bundle, double level,
                              const GammaEvaluator& gamma, Exec exec = Exec::parallel);

/// ||X(omega_m)||_gamma for every path.
std::vector<double> represented_norms(const ElementaryProcess& phi, const PathBundle& bundle,
                                      const GammaEvaluator& gamma, Exec exec = Exec::parallel);

}  // namespace gammaflow
