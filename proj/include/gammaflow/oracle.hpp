#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gammaflow/exec.hpp"
#include "gammaflow/process.hpp"
#include "gammaflow/space.hpp"

namespace gammaflow {

/// Largest number of independent signs we are willing to enumerate.
inline constexpr std::size_t kMaxSignBits = 24;

/// Full binary tree of Rademacher increments s * sign, s = sqrt(dt). With
/// copies = 2 every step carries d_H real signs followed by d_H shadow
/// signs for the decoupled copy. Bit b of a leaf index is the sign at
/// position b (1 means +1), so low bits belong to early steps.
class SignTree {
public:
    SignTree(std::size_t depth, std::size_t d_h, double dt, std::size_t copies = 1);

    std::size_t depth() const { return depth_; }
    std::size_t d_h() const { return d_h_; }
    std::size_t copies() const { return copies_; }
    double dt() const { return dt_; }
    double scale() const { return scale_; }
    std::size_t bits() const { return depth_ * d_h_ * copies_; }
    std::size_t bits_per_step() const { return d_h_ * copies_; }
    std::size_t leaves() const { return std::size_t{1} << bits(); }

    int sign(std::size_t leaf, std::size_t step, std::size_t k, std::size_t copy = 0) const {
        const std::size_t b = step * bits_per_step() + copy * d_h_ + k;
        return (leaf >> b) & 1U ? 1 : -1;
    }
    /// Increments of copy `copy` along the leaf, layout [step][k].
    void increments(std::size_t leaf, std::size_t copy, double* out) const;
    /// Leaf bits of steps < n.
    std::size_t prefix(std::size_t leaf, std::size_t n) const {
        return leaf & ((std::size_t{1} << (n * bits_per_step())) - 1);
    }

private:
    std::size_t depth_;
    std::size_t d_h_;
    double dt_;
    double scale_;
    std::size_t copies_;
};

/// E f over the tree: leaves summed pairwise in index order, divided by
/// the leaf count.
double exact_expectation(const SignTree& tree, const std::function<double(std::size_t)>& f,
                         Exec exec = Exec::parallel);

/// (E ||F||^p)^{1/p} of an E-valued leaf functional given as leaves x d_E.
double exact_moment(std::span<const double> values, const BanachSpaceSpec& e, double p);

/// The decoupling construction on one tree: d_n = Phi_n (s a_n),
/// e_n = Phi_n (s b_n) from real signs a and shadow signs b,
/// r_{2n-1} = (d_n + e_n) / 2 and r_{2n} = (d_n - e_n) / 2.
struct DecouplingTranscript {
    std::size_t leaves = 0;
    std::size_t steps = 0;
    std::size_t dim = 0;
    std::vector<double> d;  // leaves x steps x dim
    std::vector<double> e;  // leaves x steps x dim
    std::vector<double> r;  // leaves x 2 steps x dim

    const double* d_at(std::size_t leaf, std::size_t n) const { return d.data() + (leaf * steps + n) * dim; }
    const double* e_at(std::size_t leaf, std::size_t n) const { return e.data() + (leaf * steps + n) * dim; }
    const double* r_at(std::size_t leaf, std::size_t j) const { return r.data() + (leaf * 2 * steps + j) * dim; }
    /// sum_n d_n, leaves x dim.
    std::vector<double> d_sums() const;
    std::vector<double> e_sums() const;
};

/// Builds r from given d and e (leaves x steps x dim each, same layout).
/// Misaligned inputs are an InputError.
DecouplingTranscript decoupling_transform(std::vector<double> d, std::vector<double> e, std::size_t leaves,
                                          std::size_t steps, std::size_t dim);

/// `phi` must live on a grid with bins == tree.depth() and dt == tree.dt(),
/// and the tree must carry two copies with matching d_H.
DecouplingTranscript decoupling_transcript(const SignTree& tree, const ElementaryProcess& phi,
                                           Exec exec = Exec::parallel);

struct TranscriptCheck {
    std::size_t sum_mismatches = 0;          // leaves where sum d != sum r
    std::size_t alternating_mismatches = 0;  // leaves where sum e != sum (-1)^{j+1} r_j
    /// max over j and atoms of |E[r_j | G_{j-1}]|, exact arithmetic expected.
    double conditional_defect = 0.0;
};

/// The filtration: G_{2n-2} is generated by both copies up to step n-1;
/// G_{2n-1} adds a_n + b_n.
TranscriptCheck check_transcript(const SignTree& tree, const DecouplingTranscript& t);

struct UMDRatioEstimate {
    double p = 2.0;
    std::size_t depth = 0;
    std::size_t trials = 0;
    double max_ratio = 1.0;
    std::vector<int> argmax_pattern;
    std::size_t argmax_trial = 0;
};

/// Lower bound for the UMD constant: for random martingale difference
/// sequences d_j = v_j(prefix) s_j with small integer vectors v_j, the
/// largest exact (E||sum eps_j d_j||^p / E||sum d_j||^p)^{1/p} over all sign
/// patterns eps (eps_1 = +1; the ratio is even in eps).
UMDRatioEstimate umd_ratio(const BanachSpaceSpec& e, double p, std::size_t depth, std::size_t trials,
                           std::uint64_t seed, Exec exec = Exec::parallel);

/// Predictable integrand on a single-copy, d_H = 1 tree: value(n, prefix)
/// is the coefficient at step n given the signs of steps < n.
struct PredictableIntegrand {
    std::size_t depth = 0;
    std::size_t dim = 0;
    std::vector<std::vector<double>> table;  // table[n] has 2^n x dim entries

    const double* value(std::size_t n, std::size_t prefix) const { return table[n].data() + prefix * dim; }
};

/// Solves F = sum_n phi_n s sign_n for a mean-zero target (leaves x dim).
/// A mean beyond `tolerance` is an InputError.
PredictableIntegrand discrete_representation(const SignTree& tree, std::span<const double> target,
                                             std::size_t dim, double tolerance = 1e-12);

/// sum_n phi_n s sign_n at every leaf, leaves x dim.
std::vector<double> discrete_integral(const SignTree& tree, const PredictableIntegrand& phi);

}  // namespace gammaflow
