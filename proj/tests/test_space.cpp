#include <doctest.h>

#include <cmath>
#include <string>

#include "gammaflow/errors.hpp"
#include "gammaflow/generators.hpp"
#include "gammaflow/space.hpp"
#include "support.hpp"

using namespace gammaflow;

TEST_CASE("time grid spacing and snapping") {
    const TimeGrid g(1.0, 4);
    CHECK(g.dt() == 0.25);
    CHECK(g.time(4) == 1.0);
    CHECK(g.snap(0.0) == 0);
    CHECK(g.snap(0.125) == 1);  // half rounds up
    CHECK(g.snap(0.124) == 0);
    CHECK(g.snap(1.0) == 4);
    CHECK_THROWS_AS(g.snap(-0.1), InputError);
    CHECK_THROWS_AS(g.snap(1.1), InputError);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), InputError);
    CHECK_THROWS_AS(TimeGrid(0.0, 4), InputError);
    CHECK_THROWS_AS(TimeGrid(-1.0, 4), InputError);

    const TimeGrid odd(0.7, 13);
    CHECK(std::abs(odd.dt() * 13 - 0.7) <= 1e-15);
}

TEST_CASE("banach norms on small vectors") {
    const auto h = BanachSpaceSpec::hilbert(2);
    const std::vector<double> x{3.0, 4.0};
    CHECK(banach_norm(h, x) == 5.0);

    const auto l1half = BanachSpaceSpec::lq(2, 3.0);
    CHECK(banach_norm(l1half, std::vector<double>{1.0, 0.0}) == doctest::Approx(1.0));
    CHECK(banach_norm(l1half, std::vector<double>{2.0, -2.0}) == doctest::Approx(2.0 * std::cbrt(2.0)));

    const auto weighted = BanachSpaceSpec::lq(2, 2.0, {0.25, 4.0});
    CHECK(banach_norm(weighted, std::vector<double>{2.0, 0.5}) == doctest::Approx(std::sqrt(2.0)));

    CHECK_THROWS_AS(banach_norm(h, std::vector<double>{1.0}), InputError);
}

TEST_CASE("lq with q = 2 and unit weights matches the Euclidean norm exactly") {
    const auto h = BanachSpaceSpec::hilbert(6);
    const auto l2 = BanachSpaceSpec::lq(6, 2.0);
    for (std::size_t i = 0; i < 20; ++i) {
        const Matrix m = random_matrix(1, 6, 11, i);
        const std::span<const double> x(m.data(), 6);
        CHECK(banach_norm(h, x) == banach_norm(l2, x));
    }
}

TEST_CASE("invalid space parameters") {
    try {
        (void)BanachSpaceSpec::lq(3, 1.0);
        FAIL("q = 1 accepted");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("q must lie in (1, ∞)") != std::string::npos);
    }
    CHECK_THROWS_AS(BanachSpaceSpec::lq(3, 0.5), InputError);
    CHECK_THROWS_AS(BanachSpaceSpec::lq(3, 2.0, {1.0, 0.0, 1.0}), InputError);
    CHECK_THROWS_AS(BanachSpaceSpec::lq(3, 2.0, {1.0, 1.0}), InputError);
    CHECK_THROWS_AS(BanachSpaceSpec::hilbert(0), InputError);
}

TEST_CASE("norm axioms on random vectors") {
    for (double q : {1.5, 2.0, 3.0, 4.0}) {
        const auto e = BanachSpaceSpec::lq(5, q, {0.5, 1.0, 2.0, 1.0, 0.3});
        for (std::size_t i = 0; i < 30; ++i) {
            const Matrix m = random_matrix(2, 5, 3, i);
            const std::vector<double> x(m.data(), m.data() + 5);
            const std::vector<double> y(m.data() + 5, m.data() + 10);
            std::vector<double> sum(5), scaled(5);
            for (int k = 0; k < 5; ++k) {
                sum[k] = x[k] + y[k];
                scaled[k] = -2.5 * x[k];
            }
            CHECK(banach_norm(e, sum) <= banach_norm(e, x) + banach_norm(e, y) + 1e-12);
            CHECK(gftest::close_rel(banach_norm(e, scaled), 2.5 * banach_norm(e, x), 1e-12));
            // Hölder for the weighted pairing.
            CHECK(std::abs(duality_pair(e, x, y)) <= banach_norm(e, x) * dual_norm(e, y) + 1e-12);
        }
        CHECK(banach_norm(e, std::vector<double>(5, 0.0)) == 0.0);
    }
}

TEST_CASE("duality pairing and dual norm") {
    const auto e = BanachSpaceSpec::lq(2, 4.0, {2.0, 1.0});
    const std::vector<double> x{1.0, -2.0}, xs{3.0, 0.5};
    CHECK(duality_pair(e, x, xs) == doctest::Approx(2.0 * 3.0 - 1.0));
    CHECK(e.dual_q() == doctest::Approx(4.0 / 3.0));
    const double expected = std::pow(2.0 * std::pow(3.0, 4.0 / 3.0) + std::pow(0.5, 4.0 / 3.0), 0.75);
    CHECK(dual_norm(e, xs) == doctest::Approx(expected));
    CHECK(dual_norm(BanachSpaceSpec::hilbert(2), std::vector<double>{3.0, 4.0}) == 5.0);
}

TEST_CASE("step-function basis is orthonormal") {
    const TimeGrid g(2.0, 5);
    const HilbertSpec h{3};
    for (std::size_t a = 0; a < 15; ++a)
        for (std::size_t b = 0; b < 15; ++b) {
            const auto f = L2StepFunction::basis(g, h, a / 3, a % 3);
            const auto u = L2StepFunction::basis(g, h, b / 3, b % 3);
            CHECK(l2_inner(f, u, g) == doctest::Approx(a == b ? 1.0 : 0.0));
        }
    CHECK_THROWS_AS(L2StepFunction::basis(g, h, 5, 0), InputError);
    CHECK_THROWS_AS(L2StepFunction::basis(g, h, 0, 3), InputError);
}

TEST_CASE("constant step function has squared norm T |value|^2") {
    const TimeGrid g(2.0, 8);
    const std::vector<double> v{1.0, 2.0};
    const auto f = L2StepFunction::constant(g, v);
    CHECK(l2_inner(f, f, g) == doctest::Approx(2.0 * 5.0));
    const auto z = L2StepFunction::zero(g, HilbertSpec{2});
    CHECK(l2_inner(f, z, g) == 0.0);
}
