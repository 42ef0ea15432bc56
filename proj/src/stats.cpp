#include "gammaflow/stats.hpp"

#include <cmath>
#include <vector>

#include "gammaflow/errors.hpp"
#include "gammaflow/exec.hpp"

namespace gammaflow {

namespace {

double power(double x, double p) { return p == 2.0 ? x * x : std::pow(x, p); }
double root(double m, double p) { return p == 2.0 ? std::sqrt(m) : std::pow(m, 1.0 / p); }

std::vector<double> powers(std::span<const double> xs, double p) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] >= 0.0)) throw InputError("moment samples must be nonnegative");
        out[i] = power(xs[i], p);
    }
    return out;
}

// Sample covariance of two equally long series with known means.
double covariance(std::span<const double> a, double ma, std::span<const double> b, double mb) {
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = (a[i] - ma) * (b[i] - mb);
    return pairwise_sum(prod) / static_cast<double>(a.size() - 1);
}

MomentEstimate from_powers(std::span<const double> ys, double p) {
    const MeanEstimate m = estimate_mean(ys);
    MomentEstimate out;
    out.p = p;
    out.samples = ys.size();
    out.power_mean = m.mean;
    out.power_stderr = m.standard_error;
    out.value = root(m.mean, p);
    out.standard_error = m.mean > 0.0 ? out.value / (p * m.mean) * m.standard_error : 0.0;
    return out;
}

}  // namespace

MeanEstimate estimate_mean(std::span<const double> xs) {
    if (xs.size() < 2) throw InputError("need at least two samples");
    MeanEstimate out;
    out.samples = xs.size();
    out.mean = mean(xs);
    const double var = covariance(xs, out.mean, xs, out.mean);
    out.standard_error = std::sqrt(var / static_cast<double>(xs.size()));
    return out;
}

MomentEstimate estimate_moment(std::span<const double> xs, double p) {
    if (!(p >= 1.0)) throw InputError("p must be at least 1");
    const auto ys = powers(xs, p);
    return from_powers(ys, p);
}

MomentEstimate exact_moment_value(double value, double p) {
    MomentEstimate out;
    out.p = p;
    out.value = value;
    out.power_mean = power(value, p);
    return out;
}

PairedRatio paired_ratio(std::span<const double> xs, std::span<const double> ys, double p) {
    if (xs.size() != ys.size()) throw InputError("paired samples must have equal length");
    const auto a = powers(xs, p);
    const auto b = powers(ys, p);
    PairedRatio out;
    out.lhs = from_powers(a, p);
    out.rhs = from_powers(b, p);
    const double ma = out.lhs.power_mean, mb = out.rhs.power_mean;
    if (!(mb > 0.0)) throw InputError("denominator moment is zero");
    out.ratio = root(ma / mb, p);
    if (ma > 0.0) {
        const double n = static_cast<double>(xs.size());
        const double cab = covariance(a, ma, b, mb) / n;
        const double va = out.lhs.power_stderr * out.lhs.power_stderr;
        const double vb = out.rhs.power_stderr * out.rhs.power_stderr;
        const double vlog = va / (ma * ma) + vb / (mb * mb) - 2.0 * cab / (ma * mb);
        out.ratio_stderr = out.ratio * std::sqrt(std::max(vlog, 0.0)) / p;
    }
    return out;
}

MeanEstimate estimate_proportion(std::size_t hits, std::size_t n) {
    if (n == 0) throw InputError("no trials");
    if (hits > n) throw InputError("more hits than trials");
    MeanEstimate out;
    out.samples = n;
    out.mean = static_cast<double>(hits) / static_cast<double>(n);
    out.standard_error = std::sqrt(out.mean * (1.0 - out.mean) / static_cast<double>(n));
    return out;
}

}  // namespace gammaflow
