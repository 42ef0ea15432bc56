#include <doctest.h>

#include <cmath>
#include <vector>

#include "gammaflow/errors.hpp"
#include "gammaflow/rng.hpp"
#include "gammaflow/stats.hpp"

using namespace gammaflow;

// Known-answer vectors published with the Random123 reference code.
TEST_CASE("philox4x32-10 known answers") {
    using C = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and disjoint") {
    Stream a(7, Purpose::increments, 3), b(7, Purpose::increments, 3);
    Stream c(7, Purpose::increments, 4), d(7, Purpose::decoupled_increments, 3), e(8, Purpose::increments, 3);
    std::size_t same_c = 0, same_d = 0, same_e = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        same_c += x == c.next_u64();
        same_d += x == d.next_u64();
        same_e += x == e.next_u64();
    }
    CHECK(same_c == 0);
    CHECK(same_d == 0);
    CHECK(same_e == 0);
}

TEST_CASE("uniform, sign and integer draws stay in range") {
    Stream s(1, Purpose::experiment, 0);
    std::size_t plus = 0;
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 20000; ++i) {
        const double u = s.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        plus += s.sign() > 0;
        const auto k = s.integer(-3, 3);
        REQUIRE(k >= -3);
        REQUIRE(k <= 3);
        ++counts[static_cast<std::size_t>(k + 3)];
    }
    const auto prop = estimate_proportion(plus, 20000);
    CHECK(std::abs(prop.mean - 0.5) <= 4 * prop.standard_error);
    for (int c : counts) CHECK(c > 2500);
}

TEST_CASE("normal draws have unit variance for both methods") {
    for (auto method : {NormalMethod::box_muller, NormalMethod::inverse_cdf}) {
        Stream s(5, Purpose::experiment, 1, method);
        std::vector<double> x(200000), x2(200000);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = s.normal();
            x2[i] = x[i] * x[i];
        }
        const auto m = estimate_mean(x);
        const auto v = estimate_mean(x2);
        CHECK(std::abs(m.mean) <= 4 * m.standard_error);
        CHECK(std::abs(v.mean - 1.0) <= 4 * v.standard_error);
    }
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
    for (double p : {1e-6, 0.01, 0.2, 0.4})
        CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-12));
}

TEST_CASE("normal method names") {
    CHECK(parse_normal_method(to_string(NormalMethod::box_muller)) == NormalMethod::box_muller);
    CHECK(parse_normal_method(to_string(NormalMethod::inverse_cdf)) == NormalMethod::inverse_cdf);
    CHECK_THROWS_AS(parse_normal_method("ziggurat"), InputError);
}
