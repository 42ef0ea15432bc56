#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace gammaflow {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Disjoint counter ranges. Every random quantity in the library is drawn
/// from a stream keyed by (seed, purpose, id), so results never depend on
/// which worker draws them.
enum class Purpose : std::uint32_t {
    increments = 1,
    decoupled_increments = 2,
    gamma_series = 3,
    process_generator = 4,
    example29 = 5,
    oracle_integrand = 6,
    umd_trials = 7,
    martingale_spec = 8,
    experiment = 9,
};

enum class NormalMethod { box_muller, inverse_cdf };

std::string to_string(NormalMethod m);
NormalMethod parse_normal_method(const std::string& s);

/// Standard normal quantile (Acklam's rational approximation with one
/// Halley refinement step; relative error below 1e-15 in double).
double normal_quantile(double p);

/// Sequential view of one Philox stream.
class Stream {
public:
    Stream(std::uint64_t seed, Purpose purpose, std::uint64_t id,
           NormalMethod method = NormalMethod::box_muller);

    std::uint64_t next_u64();
    /// Uniform on (0, 1), never exactly 0 or 1.
    double uniform();
    double normal();
    /// +1 or -1 with equal probability.
    double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }
    /// Integer uniform on [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    NormalMethod method_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gammaflow
