#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "gammaflow/errors.hpp"
#include "gammaflow/gamma_ops.hpp"
#include "gammaflow/generators.hpp"
#include "support.hpp"

using namespace gammaflow;

namespace {

GammaOperator random_op(const TimeGrid& g, std::size_t dh, const BanachSpaceSpec& e, std::size_t idx,
                        std::uint64_t seed = 21) {
    return GammaOperator(random_matrix(e.dim(), g.bins() * dh, seed, idx), g, HilbertSpec{dh}, e);
}

Matrix contraction(std::size_t n, std::uint64_t seed, std::size_t idx) {
    Matrix b = random_matrix(n, n, seed, idx);
    const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(b)).singularValues()(0);
    return b / s;
}

Matrix orthogonal(std::size_t n, std::uint64_t seed, std::size_t idx) {
    const Eigen::MatrixXd b = random_matrix(n, n, seed, idx);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ() * Eigen::MatrixXd::Identity(n, n);
}

bool within(const GammaNormEstimate& a, double exact, double z = 4.0) {
    return std::abs(a.value - exact) <= z * a.standard_error;
}

}  // namespace

TEST_CASE("exact gamma norm examples") {
    const TimeGrid g1(1.0, 1);
    Matrix one(1, 1);
    one << 1.0;
    CHECK(gamma_norm_exact(GammaOperator(one, g1, HilbertSpec{1}, BanachSpaceSpec::hilbert(1))) == 1.0);

    const TimeGrid g2(1.0, 2);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 4.0;
    CHECK(gamma_norm_exact(GammaOperator(d, g2, HilbertSpec{1}, BanachSpaceSpec::hilbert(2))) == 5.0);

    CHECK(gamma_norm_exact(GammaOperator::zero(g2, HilbertSpec{2}, BanachSpaceSpec::hilbert(3))) == 0.0);
    CHECK_THROWS_AS(gamma_norm_exact(GammaOperator::zero(g2, HilbertSpec{1}, BanachSpaceSpec::lq(2, 3.0))),
                    UnsupportedMethod);
    CHECK_THROWS_AS(GammaOperator(Matrix::Zero(2, 3), g2, HilbertSpec{1}, BanachSpaceSpec::hilbert(2)), InputError);
    CHECK_THROWS_AS(GammaOperator(Matrix::Zero(3, 2), g2, HilbertSpec{1}, BanachSpaceSpec::hilbert(2)), InputError);
}

TEST_CASE("rank-one operators: gamma norm is |f| |x| in any target") {
    const TimeGrid g(1.0, 4);
    const HilbertSpec h{2};
    const std::vector<double> c = gftest::ramp(8, 0.25);
    double fn = 0.0;
    for (double v : c) fn += v * v;
    fn = std::sqrt(fn);
    for (const auto& e : {BanachSpaceSpec::hilbert(3), BanachSpaceSpec::lq(3, 3.0, {1.0, 2.0, 0.5})}) {
        const std::vector<double> x{1.0, -0.5, 2.0};
        Matrix a(3, 8);
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 8; ++k) a(r, k) = x[r] * c[k];
        const GammaOperator op(a, g, h, e);
        const double expected = fn * banach_norm(e, x);
        const auto mc = gamma_norm_mc(op, 20000, 4);
        CHECK(within(mc, expected));
        if (e.variant() == SpaceVariant::hilbert) CHECK(gamma_norm_exact(op) == doctest::Approx(expected));
    }
}

TEST_CASE("Monte Carlo gamma norm agrees with Frobenius on 50 Hilbert operators") {
    const TimeGrid g(1.0, 4);
    const auto e = BanachSpaceSpec::hilbert(4);
    std::size_t outside = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        const auto op = random_op(g, 2, e, i);
        const auto mc = gamma_norm_mc(op, 20000, 100 + i);
        outside += !within(mc, gamma_norm_exact(op));
        CHECK(mc.samples == 20000);
    }
    CHECK(outside == 0);
}

TEST_CASE("zero operator has zero Monte Carlo norm") {
    const TimeGrid g(1.0, 3);
    const auto est = gamma_norm_mc(GammaOperator::zero(g, HilbertSpec{1}, BanachSpaceSpec::lq(2, 4.0)), 100, 1);
    CHECK(est.value == 0.0);
    CHECK(est.standard_error == 0.0);
}

TEST_CASE("Gaussian series matches gamma_norm_mc for the same seed") {
    const TimeGrid g(1.0, 4);
    const auto e = BanachSpaceSpec::lq(3, 4.0);
    const auto op = random_op(g, 2, e, 3);
    const GaussianSeries series(8, 500, 9);
    const auto a = series.estimate(op.matrix(), e);
    const auto b = gamma_norm_mc(op, 500, 9);
    // Same draws; only the summation order of the products differs.
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    CHECK(a.standard_error == doctest::Approx(b.standard_error).epsilon(1e-9));
    CHECK_THROWS_AS(GaussianSeries(4, 500, 9).estimate(op.matrix(), e), InputError);
}

TEST_CASE("square function norm") {
    const TimeGrid g(1.0, 4);
    SUBCASE("q = 2 with unit weights equals Frobenius") {
        const auto e = BanachSpaceSpec::lq(5, 2.0);
        for (std::size_t i = 0; i < 20; ++i) {
            const auto op = random_op(g, 2, e, i);
            CHECK(std::abs(square_function_norm(op) - frobenius(op.matrix())) <= 1e-10);
        }
    }
    SUBCASE("single point reduces to the Euclidean norm of the row") {
        const auto e = BanachSpaceSpec::lq(1, 3.0);
        const auto op = random_op(g, 2, e, 1);
        CHECK(square_function_norm(op) == doctest::Approx(frobenius(op.matrix())));
    }
    SUBCASE("homogeneous") {
        const auto e = BanachSpaceSpec::lq(4, 1.5);
        const auto op = random_op(g, 1, e, 2);
        const GammaOperator scaled(-3.0 * op.matrix(), g, HilbertSpec{1}, e);
        CHECK(square_function_norm(scaled) == doctest::Approx(3.0 * square_function_norm(op)));
    }
    SUBCASE("Hilbert targets are unsupported") {
        CHECK_THROWS_AS(square_function_norm(random_op(g, 1, BanachSpaceSpec::hilbert(2), 0)), UnsupportedMethod);
    }
    SUBCASE("ratio to the Gaussian norm stays within the Khintchine-Kahane constants") {
        for (double q : {1.5, 4.0}) {
            const auto e = BanachSpaceSpec::lq(6, q);
            for (std::size_t i = 0; i < 20; ++i) {
                const auto op = random_op(g, 2, e, i);
                const double ratio = square_function_norm(op) / gamma_norm_mc(op, 4000, i).value;
                CHECK(ratio > 0.5);
                CHECK(ratio < 2.0);
            }
        }
    }
}

TEST_CASE("ideal property") {
    const TimeGrid g(1.0, 3);
    const HilbertSpec h{2};
    SUBCASE("identity and scalar multiples") {
        const auto e = BanachSpaceSpec::hilbert(3);
        const auto op = random_op(g, 2, e, 5);
        const Matrix i6 = Matrix::Identity(6, 6);
        CHECK(compose_ideal(Matrix::Identity(3, 3), op, i6).matrix() == op.matrix());
        const auto scaled = compose_ideal(-2.0 * Matrix::Identity(3, 3), op, i6);
        CHECK(gamma_norm_exact(scaled) == doctest::Approx(2.0 * gamma_norm_exact(op)));
    }
    SUBCASE("contractions do not increase the exact norm") {
        const auto e = BanachSpaceSpec::hilbert(4);
        for (std::size_t i = 0; i < 30; ++i) {
            const auto op = random_op(g, 2, e, i);
            const auto c = compose_ideal(contraction(4, 3, i), op, contraction(6, 4, i));
            CHECK(gamma_norm_exact(c) <= gamma_norm_exact(op) * (1 + 1e-12));
        }
    }
    SUBCASE("contractions on L^q: Monte Carlo with common draws") {
        const auto e = BanachSpaceSpec::lq(3, 4.0);
        for (std::size_t i = 0; i < 10; ++i) {
            const auto op = random_op(g, 2, e, i);
            Matrix b2 = Matrix::Zero(3, 3);
            for (int k = 0; k < 3; ++k) b2(k, (k + 1) % 3) = (k == 0 ? -0.5 : 1.0);  // permutation times a diagonal contraction
            const auto c = compose_ideal(b2, op, contraction(6, 5, i));
            const auto lhs = gamma_norm_mc(c, 20000, 50 + i);
            const auto rhs = gamma_norm_mc(op, 20000, 50 + i);
            CHECK(lhs.value <= rhs.value + 4 * (lhs.standard_error + rhs.standard_error));
            CHECK(square_function_norm(c) <= square_function_norm(op) * (1 + 1e-12));
        }
    }
    SUBCASE("shape errors") {
        const auto op = random_op(g, 2, BanachSpaceSpec::lq(3, 3.0), 0);
        CHECK_THROWS_AS(compose_ideal(Matrix::Identity(3, 3), op, Matrix::Identity(5, 5)), InputError);
        CHECK_THROWS_AS(compose_ideal(Matrix::Identity(3, 2), op, Matrix::Identity(6, 6)), InputError);
        CHECK_THROWS_AS(compose_ideal(Matrix::Identity(2, 3), op, Matrix::Identity(6, 6)), InputError);
        const auto moved = compose_ideal(Matrix::Identity(2, 3), op, Matrix::Identity(6, 6), BanachSpaceSpec::lq(2, 3.0));
        CHECK(moved.target().dim() == 2);
    }
}

TEST_CASE("gamma norm is invariant under orthogonal changes of basis") {
    const TimeGrid g(1.0, 4);
    const auto h = BanachSpaceSpec::hilbert(3);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto op = random_op(g, 2, h, i);
        const auto rotated = compose_ideal(Matrix::Identity(3, 3), op, orthogonal(8, 6, i));
        CHECK(gftest::close_rel(gamma_norm_exact(rotated), gamma_norm_exact(op), 1e-12));
    }
    const auto e = BanachSpaceSpec::lq(3, 4.0);
    for (std::size_t i = 0; i < 5; ++i) {
        const auto op = random_op(g, 2, e, i);
        const auto rotated = compose_ideal(Matrix::Identity(3, 3), op, orthogonal(8, 7, i));
        const auto a = gamma_norm_mc(op, 40000, 1);
        const auto b = gamma_norm_mc(rotated, 40000, 2);
        CHECK(std::abs(a.value - b.value) <= 4 * std::hypot(a.standard_error, b.standard_error));
    }
}

TEST_CASE("time truncation") {
    const TimeGrid g(2.0, 8);
    const auto e = BanachSpaceSpec::hilbert(3);
    const auto op = random_op(g, 2, e, 9);
    CHECK(truncate_time(op, 2.0).matrix() == op.matrix());
    CHECK(gamma_norm_exact(truncate_time(op, 0.0)) == 0.0);
    double prev = 0.0;
    for (std::size_t j = 0; j <= 8; ++j) {
        const double v = gamma_norm_exact(truncate_bins(op, j));
        CHECK(v >= prev);
        prev = v;
        for (std::size_t k = 0; k <= 8; ++k)
            CHECK(truncate_bins(truncate_bins(op, j), k).matrix() == truncate_bins(op, std::min(j, k)).matrix());
    }
    CHECK_THROWS_AS(truncate_time(op, 2.5), InputError);
    CHECK_THROWS_AS(truncate_bins(op, 9), InputError);

    const auto lq = random_op(g, 2, BanachSpaceSpec::lq(3, 4.0), 9);
    const GaussianSeries series(16, 20000, 3);
    double prev_mc = 0.0, prev_se = 0.0;
    for (std::size_t j = 0; j <= 8; ++j) {
        const auto est = series.estimate(truncate_bins(lq, j).matrix(), lq.target());
        CHECK(est.value >= prev_mc - 4 * (est.standard_error + prev_se));
        prev_mc = est.value;
        prev_se = est.standard_error;
    }
}

TEST_CASE("right translation") {
    const TimeGrid g(1.0, 4);
    const auto e = BanachSpaceSpec::hilbert(2);
    const auto op = random_op(g, 1, e, 4);
    CHECK(right_translate(op, 0.0).matrix() == op.matrix());
    CHECK(gamma_norm_exact(right_translate(op, 1.0)) == 0.0);
    CHECK(gamma_norm_exact(right_translate(op, 5.0)) == 0.0);
    for (double a : {0.25, 0.5})
        for (double b : {0.0, 0.25, 0.5})
            CHECK(right_translate(right_translate(op, a), b).matrix() == right_translate(op, a + b).matrix());
    double prev = gamma_norm_exact(op);
    for (double d : {0.25, 0.5, 0.75, 1.0}) {
        const double v = gamma_norm_exact(right_translate(op, d));
        CHECK(v <= prev);
        prev = v;
    }
    // Column block j + 1 of the shifted operator is block j of the original.
    const auto s = right_translate(op, 0.25);
    CHECK(s.matrix().col(0).isZero());
    CHECK(s.matrix().col(2) == op.matrix().col(1));
    CHECK_THROWS_AS(right_translate(op, -0.25), InputError);
}

TEST_CASE("apply and adjoint are consistent with the weighted pairing") {
    const TimeGrid g(1.0, 3);
    const auto e = BanachSpaceSpec::lq(3, 3.0, {0.5, 1.0, 2.0});
    const auto op = random_op(g, 2, e, 8);
    const Matrix fm = random_matrix(3, 2, 5, 0);
    const L2StepFunction f{fm};
    const std::vector<double> xs{0.3, -1.0, 2.0};
    const Vector x = op.apply(f);
    const double lhs = duality_pair(e, std::span<const double>(x.data(), 3), xs);
    const double rhs = l2_inner(f, op.adjoint_apply(xs), g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("gamma Fubini comparison") {
    const TimeGrid g(1.0, 4);
    const auto h = BanachSpaceSpec::hilbert(3);
    SUBCASE("single operator gives equality") {
        std::vector<WeightedOperator> one{{random_op(g, 2, h, 0), 1.0}};
        const auto r = gamma_fubini_compare(one, 2.0, 1000, 1);
        CHECK(r.exact);
        CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-14));
        CHECK(r.lhs == doctest::Approx(gamma_norm_exact(one[0].op)).epsilon(1e-14));
    }
    SUBCASE("Hilbert p = 2 is exact on random families") {
        for (std::size_t i = 0; i < 10; ++i) {
            std::vector<WeightedOperator> fam;
            for (std::size_t s = 0; s < 4; ++s) fam.push_back({random_op(g, 2, h, 10 * i + s), 0.25});
            const auto r = gamma_fubini_compare(fam, 2.0, 100, 1);
            CHECK(r.exact);
            CHECK(std::abs(r.lhs - r.rhs) <= 1e-10);
        }
    }
    SUBCASE("L^q family agrees within the Monte Carlo interval at p = q") {
        const auto e = BanachSpaceSpec::lq(3, 4.0);
        std::vector<WeightedOperator> fam{{random_op(g, 1, e, 1), 0.5}, {random_op(g, 1, e, 2), 0.5}};
        const auto r = gamma_fubini_compare(fam, 4.0, 20000, 2);
        CHECK_FALSE(r.exact);
        const double ratio = r.lhs / r.rhs;
        CHECK(ratio > 0.5);
        CHECK(ratio < 2.0);
    }
    SUBCASE("invalid inputs") {
        std::vector<WeightedOperator> bad{{random_op(g, 2, h, 0), 0.7}};
        CHECK_THROWS_AS(gamma_fubini_compare(bad, 2.0, 100, 1), InputError);
        std::vector<WeightedOperator> none;
        CHECK_THROWS_AS(gamma_fubini_compare(none, 2.0, 100, 1), InputError);
        std::vector<WeightedOperator> one{{random_op(g, 2, h, 0), 1.0}};
        CHECK_THROWS_AS(gamma_fubini_compare(one, 0.5, 100, 1), InputError);
    }
}
