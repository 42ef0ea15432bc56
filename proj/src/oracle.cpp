#include "gammaflow/oracle.hpp"

#include <cmath>
#include <string>

#include "gammaflow/errors.hpp"
#include "gammaflow/rng.hpp"

namespace gammaflow {

SignTree::SignTree(std::size_t depth, std::size_t d_h, double dt, std::size_t copies)
    : depth_(depth), d_h_(d_h), dt_(dt), scale_(std::sqrt(dt)), copies_(copies) {
    if (depth == 0 || d_h == 0) throw InputError("tree needs depth >= 1 and d_H >= 1");
    if (copies != 1 && copies != 2) throw InputError("a tree carries one or two copies");
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    if (bits() > kMaxSignBits)
        throw BudgetExceeded("sign tree with " + std::to_string(bits()) + " independent signs (2^" +
                             std::to_string(bits()) + " leaves) exceeds the budget of 2^" +
                             std::to_string(kMaxSignBits));
}

void SignTree::increments(std::size_t leaf, std::size_t copy, double* out) const {
    for (std::size_t n = 0; n < depth_; ++n)
        for (std::size_t k = 0; k < d_h_; ++k) out[n * d_h_ + k] = scale_ * sign(leaf, n, k, copy);
}

double exact_expectation(const SignTree& tree, const std::function<double(std::size_t)>& f, Exec exec) {
    std::vector<double> values(tree.leaves());
    for_each_index(exec, values.size(), [&](std::size_t leaf) { values[leaf] = f(leaf); });
    return std::ldexp(pairwise_sum(values), -static_cast<int>(tree.bits()));
}

double exact_moment(std::span<const double> values, const BanachSpaceSpec& e, double p) {
    const std::size_t dim = e.dim();
    if (dim == 0 || values.size() % dim != 0) throw InputError("values must be leaves x d_E");
    const std::size_t n = values.size() / dim;
    std::vector<double> powers(n);
    for (std::size_t i = 0; i < n; ++i) powers[i] = e.norm_pow_unchecked(values.data() + i * dim, p);
    const double m = pairwise_sum(powers) / static_cast<double>(n);
    return p == 2.0 ? std::sqrt(m) : std::pow(m, 1.0 / p);
}

std::vector<double> DecouplingTranscript::d_sums() const {
    std::vector<double> out(leaves * dim, 0.0);
    for (std::size_t l = 0; l < leaves; ++l)
        for (std::size_t n = 0; n < steps; ++n)
            for (std::size_t r = 0; r < dim; ++r) out[l * dim + r] += d_at(l, n)[r];
    return out;
}

std::vector<double> DecouplingTranscript::e_sums() const {
    std::vector<double> out(leaves * dim, 0.0);
    for (std::size_t l = 0; l < leaves; ++l)
        for (std::size_t n = 0; n < steps; ++n)
            for (std::size_t r = 0; r < dim; ++r) out[l * dim + r] += e_at(l, n)[r];
    return out;
}

DecouplingTranscript decoupling_transform(std::vector<double> d, std::vector<double> e, std::size_t leaves,
                                          std::size_t steps, std::size_t dim) {
    if (d.size() != leaves * steps * dim || e.size() != d.size())
        throw InputError("d and e must both have leaves x steps x dim entries");
    DecouplingTranscript t;
    t.leaves = leaves;
    t.steps = steps;
    t.dim = dim;
    t.d = std::move(d);
    t.e = std::move(e);
    t.r.assign(leaves * 2 * steps * dim, 0.0);
    for (std::size_t leaf = 0; leaf < leaves; ++leaf)
        for (std::size_t n = 0; n < steps; ++n) {
            const double* dn = t.d_at(leaf, n);
            const double* en = t.e_at(leaf, n);
            double* odd = t.r.data() + (leaf * 2 * steps + 2 * n) * dim;
            double* even = odd + dim;
            for (std::size_t r = 0; r < dim; ++r) {
                odd[r] = 0.5 * (dn[r] + en[r]);
                even[r] = 0.5 * (dn[r] - en[r]);
            }
        }
    return t;
}

DecouplingTranscript decoupling_transcript(const SignTree& tree, const ElementaryProcess& phi, Exec exec) {
    if (tree.copies() != 2) throw InputError("decoupling needs a tree with a shadow copy");
    if (phi.grid().bins() != tree.depth() || phi.grid().dt() != tree.dt())
        throw InputError("process grid must match the tree (bins == depth, same dt)");
    if (phi.hilbert().dim != tree.d_h()) throw InputError("process d_H must match the tree");
    const std::size_t steps = tree.depth();
    const std::size_t dh = tree.d_h();
    const std::size_t de = phi.target().dim();

    DecouplingTranscript t;
    t.leaves = tree.leaves();
    t.steps = steps;
    t.dim = de;
    t.d.assign(t.leaves * steps * de, 0.0);
    t.e.assign(t.leaves * steps * de, 0.0);

    for_each_index(exec, t.leaves, [&](std::size_t leaf) {
        std::vector<double> real(steps * dh), shadow(steps * dh), coef(phi.coefficient_size());
        tree.increments(leaf, 0, real.data());
        tree.increments(leaf, 1, shadow.data());
        phi.coefficients(real, coef.data());
        for (std::size_t n = 0; n < steps; ++n) {
            double* dn = t.d.data() + (leaf * steps + n) * de;
            double* en = t.e.data() + (leaf * steps + n) * de;
            for (std::size_t r = 0; r < de; ++r) {
                double a = 0.0, b = 0.0;
                for (std::size_t k = 0; k < dh; ++k) {
                    const double c = coef[(n * de + r) * dh + k];
                    a += c * real[n * dh + k];
                    b += c * shadow[n * dh + k];
                }
                dn[r] = a;
                en[r] = b;
            }
        }
    });
    return decoupling_transform(std::move(t.d), std::move(t.e), t.leaves, steps, de);
}

TranscriptCheck check_transcript(const SignTree& tree, const DecouplingTranscript& t) {
    TranscriptCheck out;
    const std::size_t de = t.dim;
    const std::size_t dh = tree.d_h();
    std::vector<double> sd(de), se(de), sr(de), sa(de);
    for (std::size_t leaf = 0; leaf < t.leaves; ++leaf) {
        std::fill(sd.begin(), sd.end(), 0.0);
        std::fill(se.begin(), se.end(), 0.0);
        std::fill(sr.begin(), sr.end(), 0.0);
        std::fill(sa.begin(), sa.end(), 0.0);
        for (std::size_t n = 0; n < t.steps; ++n)
            for (std::size_t r = 0; r < de; ++r) {
                sd[r] += t.d_at(leaf, n)[r];
                se[r] += t.e_at(leaf, n)[r];
            }
        for (std::size_t j = 0; j < 2 * t.steps; ++j)
            for (std::size_t r = 0; r < de; ++r) {
                sr[r] += t.r_at(leaf, j)[r];
                sa[r] += (j % 2 == 0 ? 1.0 : -1.0) * t.r_at(leaf, j)[r];
            }
        if (sd != sr) ++out.sum_mismatches;
        if (se != sa) ++out.alternating_mismatches;
    }

    std::size_t pow3 = 1;
    for (std::size_t k = 0; k < dh; ++k) pow3 *= 3;
    for (std::size_t j = 0; j < 2 * t.steps; ++j) {
        const std::size_t n = j / 2;
        const bool after_sum = j % 2 == 1;
        const std::size_t prefixes = std::size_t{1} << (n * tree.bits_per_step());
        const std::size_t atoms = after_sum ? prefixes * pow3 : prefixes;
        std::vector<double> sum(atoms * de, 0.0);
        std::vector<std::size_t> count(atoms, 0);
        for (std::size_t leaf = 0; leaf < t.leaves; ++leaf) {
            std::size_t key = tree.prefix(leaf, n);
            if (after_sum) {
                std::size_t code = 0;
                for (std::size_t k = dh; k-- > 0;) {
                    const int w = tree.sign(leaf, n, k, 0) + tree.sign(leaf, n, k, 1);
                    code = code * 3 + static_cast<std::size_t>(w / 2 + 1);
                }
                key = key * pow3 + code;
            }
            ++count[key];
            for (std::size_t r = 0; r < de; ++r) sum[key * de + r] += t.r_at(leaf, j)[r];
        }
        for (std::size_t a = 0; a < atoms; ++a) {
            if (count[a] == 0) continue;
            for (std::size_t r = 0; r < de; ++r)
                out.conditional_defect =
                    std::max(out.conditional_defect, std::abs(sum[a * de + r]) / static_cast<double>(count[a]));
        }
    }
    return out;
}

UMDRatioEstimate umd_ratio(const BanachSpaceSpec& e, double p, std::size_t depth, std::size_t trials,
                           std::uint64_t seed, Exec exec) {
    if (!(p >= 1.0)) throw InputError("p must be at least 1");
    if (depth == 0) throw InputError("depth must be at least 1");
    if (depth > 12) throw BudgetExceeded("UMD enumeration is limited to depth 12 (got " + std::to_string(depth) + ")");
    if (trials == 0) throw InputError("need at least one trial");
    const SignTree tree(depth, 1, 1.0);
    const std::size_t leaves = tree.leaves();
    const std::size_t de = e.dim();
    const std::size_t patterns = std::size_t{1} << (depth - 1);

    UMDRatioEstimate best;
    best.p = p;
    best.depth = depth;
    best.trials = trials;
    best.max_ratio = 1.0;
    best.argmax_pattern.assign(depth, 1);
    bool found = false;

    std::vector<double> d(leaves * depth * de);
    std::vector<double> moment(patterns);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        // v_j depends on the signs of steps < j only.
        for (std::size_t j = 0; j < depth; ++j) {
            const std::size_t prefixes = std::size_t{1} << j;
            std::vector<double> v(prefixes * de);
            for (std::size_t pre = 0; pre < prefixes; ++pre) {
                Stream s(seed, Purpose::umd_trials, (std::uint64_t{trial} << 32) | (j << 16) | pre);
                for (std::size_t r = 0; r < de; ++r) v[pre * de + r] = static_cast<double>(s.integer(-3, 3));
            }
            for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
                const double sgn = tree.sign(leaf, j, 0);
                const std::size_t pre = tree.prefix(leaf, j);
                for (std::size_t r = 0; r < de; ++r) d[(leaf * depth + j) * de + r] = sgn * v[pre * de + r];
            }
        }
        for_each_index(exec, patterns, [&](std::size_t pat) {
            std::vector<double> f(de), pw(leaves);
            for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
                std::fill(f.begin(), f.end(), 0.0);
                for (std::size_t j = 0; j < depth; ++j) {
                    const double eps = j > 0 && ((pat >> (j - 1)) & 1U) ? -1.0 : 1.0;
                    for (std::size_t r = 0; r < de; ++r) f[r] += eps * d[(leaf * depth + j) * de + r];
                }
                pw[leaf] = e.norm_pow_unchecked(f.data(), p);
            }
            moment[pat] = pairwise_sum(pw);
        });
        if (!(moment[0] > 0.0)) continue;
        for (std::size_t pat = 0; pat < patterns; ++pat) {
            const double q = moment[pat] / moment[0];
            const double ratio = q == 1.0 ? 1.0 : std::pow(q, 1.0 / p);
            if (!found || ratio > best.max_ratio) {
                found = true;
                best.max_ratio = ratio;
                best.argmax_trial = trial;
                for (std::size_t j = 0; j < depth; ++j)
                    best.argmax_pattern[j] = j > 0 && ((pat >> (j - 1)) & 1U) ? -1 : 1;
            }
        }
    }
    return best;
}

PredictableIntegrand discrete_representation(const SignTree& tree, std::span<const double> target,
                                             std::size_t dim, double tolerance) {
    if (tree.copies() != 1 || tree.d_h() != 1) throw InputError("representation needs a scalar single-copy tree");
    if (target.size() != tree.leaves() * dim) throw InputError("target must have leaves x d_E entries");
    const std::size_t depth = tree.depth();
    PredictableIntegrand phi;
    phi.depth = depth;
    phi.dim = dim;
    phi.table.resize(depth);
    std::vector<double> eta(target.begin(), target.end());
    for (std::size_t l = depth; l-- > 0;) {
        const std::size_t nodes = std::size_t{1} << l;
        const std::size_t plus_bit = nodes;
        std::vector<double> parent(nodes * dim);
        auto& row = phi.table[l];
        row.assign(nodes * dim, 0.0);
        for (std::size_t pre = 0; pre < nodes; ++pre)
            for (std::size_t r = 0; r < dim; ++r) {
                const double minus = eta[pre * dim + r];
                const double plus = eta[(pre | plus_bit) * dim + r];
                parent[pre * dim + r] = 0.5 * (plus + minus);
                row[pre * dim + r] = (plus - minus) / (2.0 * tree.scale());
            }
        eta.swap(parent);
    }
    for (std::size_t r = 0; r < dim; ++r)
        if (std::abs(eta[r]) > tolerance)
            throw InputError("target has nonzero mean " + std::to_string(eta[r]) +
                             "; only mean-zero variables have a representation");
    return phi;
}

std::vector<double> discrete_integral(const SignTree& tree, const PredictableIntegrand& phi) {
    if (phi.depth != tree.depth()) throw InputError("integrand depth must match the tree");
    const std::size_t dim = phi.dim;
    std::vector<double> out(tree.leaves() * dim, 0.0);
    for (std::size_t leaf = 0; leaf < tree.leaves(); ++leaf)
        for (std::size_t n = 0; n < tree.depth(); ++n) {
            const double inc = tree.scale() * tree.sign(leaf, n, 0);
            const double* v = phi.value(n, tree.prefix(leaf, n));
            for (std::size_t r = 0; r < dim; ++r) out[leaf * dim + r] += v[r] * inc;
        }
    return out;
}

}  // namespace gammaflow
