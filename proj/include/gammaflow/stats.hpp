#pragma once

#include <cstddef>
#include <span>

namespace gammaflow {

struct MeanEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

/// Sample mean with the standard error of the mean (n - 1 variance).
MeanEstimate estimate_mean(std::span<const double> xs);

/// (E X^p)^{1/p} from nonnegative samples; the standard error comes from
/// the delta method applied to the sample mean of X^p.
struct MomentEstimate {
    double p = 2.0;
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
    double power_mean = 0.0;     // sample mean of X^p
    double power_stderr = 0.0;
};

MomentEstimate estimate_moment(std::span<const double> xs, double p);
/// A deterministic quantity reported in moment form (zero error).
MomentEstimate exact_moment_value(double value, double p = 2.0);

/// (E X^p / E Y^p)^{1/p} for paired samples, with a delta-method standard
/// error that accounts for the covariance between the two power means.
struct PairedRatio {
    MomentEstimate lhs;
    MomentEstimate rhs;
    double ratio = 0.0;
    double ratio_stderr = 0.0;
};

PairedRatio paired_ratio(std::span<const double> xs, std::span<const double> ys, double p);

/// Binomial proportion with standard error sqrt(p(1-p)/n).
MeanEstimate estimate_proportion(std::size_t hits, std::size_t n);

}  // namespace gammaflow
