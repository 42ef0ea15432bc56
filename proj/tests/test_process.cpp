#include <doctest.h>

#include <vector>

#include "gammaflow/errors.hpp"
#include "gammaflow/generators.hpp"
#include "gammaflow/paths.hpp"
#include "gammaflow/process.hpp"

using namespace gammaflow;

namespace {

Matrix filled(std::size_t r, std::size_t c, double v) { return Matrix::Constant(r, c, v); }

}  // namespace

TEST_CASE("partitions must align with the grid") {
    const TimeGrid g(1.0, 4);
    const HilbertSpec h{1};
    const auto e = BanachSpaceSpec::hilbert(1);
    std::vector<CoefficientRule> two{ConstantRule{filled(1, 1, 1.0)}, ConstantRule{filled(1, 1, 2.0)}};
    const std::vector<double> good{0.0, 0.5, 1.0};
    const auto p = ElementaryProcess::from_times(g, h, e, good, two);
    CHECK(p.breaks() == std::vector<std::size_t>{0, 2, 4});
    CHECK(p.interval_of_bin(1) == 0);
    CHECK(p.interval_of_bin(2) == 1);
    const std::vector<double> misaligned{0.0, 0.3, 1.0};
    CHECK_THROWS_AS(ElementaryProcess::from_times(g, h, e, misaligned, two), InputError);
    const std::vector<double> short_end{0.0, 0.5, 0.75};
    CHECK_THROWS_AS(ElementaryProcess::from_times(g, h, e, short_end, two), InputError);
    CHECK_THROWS_AS(ElementaryProcess(g, h, e, {0, 2, 2, 4}, {two[0], two[1], two[0]}), InputError);
    CHECK_THROWS_AS(ElementaryProcess(g, h, e, {0, 4}, two), InputError);
    CHECK_THROWS_AS(ElementaryProcess::constant(g, h, e, filled(2, 1, 1.0)), InputError);
}

TEST_CASE("rules may only read strictly past increments") {
    const TimeGrid g(1.0, 4);
    const HilbertSpec h{1};
    const auto e = BanachSpaceSpec::hilbert(1);
    LinearPastRule future{2, 0, filled(1, 1, 0.0), filled(1, 1, 1.0)};
    CHECK_THROWS_AS(ElementaryProcess(g, h, e, {0, 2, 4}, {ConstantRule{filled(1, 1, 0.0)}, future}), InputError);
    LinearPastRule past{1, 0, filled(1, 1, 0.0), filled(1, 1, 1.0)};
    CHECK_NOTHROW(ElementaryProcess(g, h, e, {0, 2, 4}, {ConstantRule{filled(1, 1, 0.0)}, past}));

    const std::vector<double> inc{1.0, 2.0, 3.0, 4.0};
    const PastView view(inc, 1, 2);
    CHECK(view.increment(1, 0) == 2.0);
    CHECK(view.position(0) == 3.0);
    CHECK_THROWS_AS(view.increment(2, 0), InputError);
    CHECK_THROWS_AS(view.increment(0, 1), InputError);
}

TEST_CASE("indicator rule selects the event containing W(t_start)") {
    const TimeGrid g(1.0, 2);
    const HilbertSpec h{1};
    const auto e = BanachSpaceSpec::hilbert(1);
    IndicatorRule ind{0, {-0.5, 0.5}, {filled(1, 1, -1.0), filled(1, 1, 0.0), filled(1, 1, 1.0)}};
    const ElementaryProcess p(g, h, e, {0, 1, 2}, {ConstantRule{filled(1, 1, 7.0)}, ind});
    CHECK_FALSE(p.deterministic());
    double out[2];
    for (auto [w, expect] : {std::pair{-1.0, -1.0}, {-0.5, 0.0}, {0.2, 0.0}, {0.5, 1.0}, {3.0, 1.0}}) {
        const std::vector<double> inc{w, 0.0};
        p.coefficients(inc, out);
        CHECK(out[0] == 7.0);
        CHECK(out[1] == expect);
    }
    IndicatorRule bad{0, {0.5, -0.5}, {filled(1, 1, 0.0), filled(1, 1, 0.0), filled(1, 1, 0.0)}};
    CHECK_THROWS_AS(ElementaryProcess(g, h, e, {0, 1, 2}, {ConstantRule{filled(1, 1, 0.0)}, bad}), InputError);
}

// Changing the increment of bin i must leave every coefficient on bins <= i
// untouched.
TEST_CASE("generated adapted processes are predictable") {
    const TimeGrid g(1.0, 8);
    const HilbertSpec h{2};
    const auto e = BanachSpaceSpec::lq(3, 3.0);
    const auto b = sample_paths(g, 2, 5, 1, NoiseMode::gaussian);
    for (std::size_t idx = 0; idx < 12; ++idx) {
        const auto phi = random_adapted_process(g, h, e, 13, idx);
        const std::size_t per_bin = e.dim() * h.dim;
        std::vector<double> base(phi.coefficient_size()), moved(phi.coefficient_size());
        for (std::size_t m = 0; m < b.paths(); ++m) {
            std::vector<double> inc(b.path(m).begin(), b.path(m).end());
            phi.coefficients(inc, base.data());
            for (std::size_t i = 0; i < g.bins(); ++i)
                for (std::size_t k = 0; k < h.dim; ++k) {
                    auto mutated = inc;
                    mutated[i * h.dim + k] += 5.0;
                    phi.coefficients(mutated, moved.data());
                    for (std::size_t j = 0; j < (i + 1) * per_bin; ++j) REQUIRE(moved[j] == base[j]);
                }
        }
    }
}

TEST_CASE("adapted generator covers all rule classes") {
    const TimeGrid g(1.0, 16);
    bool seen[3] = {false, false, false};
    for (std::size_t idx = 0; idx < 6; ++idx) {
        const auto phi = random_adapted_process(g, HilbertSpec{2}, BanachSpaceSpec::hilbert(4), 7, idx);
        CHECK(std::holds_alternative<ConstantRule>(phi.rules()[0]));
        for (const auto& r : phi.rules()) seen[r.index()] = true;
    }
    CHECK(seen[0]);
    CHECK(seen[1]);
    CHECK(seen[2]);
}

TEST_CASE("deterministic generator is reproducible") {
    const TimeGrid g(1.0, 16);
    const auto a = random_deterministic_process(g, HilbertSpec{2}, BanachSpaceSpec::hilbert(4), 7, 3);
    const auto b = random_deterministic_process(g, HilbertSpec{2}, BanachSpaceSpec::hilbert(4), 7, 3);
    CHECK(a.deterministic());
    CHECK(a.breaks() == b.breaks());
    CHECK(a.breaks().size() <= 5);
    std::vector<double> ca(a.coefficient_size()), cb(b.coefficient_size());
    const std::vector<double> zero(32, 0.0);
    a.coefficients(zero, ca.data());
    b.coefficients(zero, cb.data());
    CHECK(ca == cb);
    CHECK_THROWS_AS(a.coefficients(std::vector<double>(31, 0.0), ca.data()), InputError);
}
