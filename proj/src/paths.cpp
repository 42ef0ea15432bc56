#include "gammaflow/paths.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gammaflow/errors.hpp"

namespace gammaflow {

std::string to_string(NoiseMode m) { return m == NoiseMode::gaussian ? "gaussian" : "rademacher"; }

NoiseMode parse_noise_mode(const std::string& s) {
    if (s == "gaussian") return NoiseMode::gaussian;
    if (s == "rademacher") return NoiseMode::rademacher;
    throw InputError("mode must be gaussian or rademacher, got '" + s + "'");
}

PathBundle::PathBundle(TimeGrid grid, std::size_t d_h, std::size_t paths, std::uint64_t seed,
                       NoiseMode mode, std::vector<double> increments, std::vector<double> decoupled)
    : grid_(grid), d_h_(d_h), paths_(paths), seed_(seed), mode_(mode),
      dw_(std::move(increments)), dw_tilde_(std::move(decoupled)) {
    if (d_h_ < 1) throw InputError("d_H must be positive");
    if (paths_ < 1) throw InputError("path count must be positive");
    if (dw_.size() != paths_ * stride() || dw_tilde_.size() != paths_ * stride())
        throw InputError("increment arrays do not match M * N_t * d_H");
}

PathBundle sample_paths(const TimeGrid& grid, std::size_t d_h, std::size_t paths, std::uint64_t seed,
                        NoiseMode mode, NormalMethod method, Exec exec) {
    if (paths < 1) throw InputError("path count M must be at least 1");
    if (d_h < 1) throw InputError("d_H must be positive");
    const std::size_t stride = grid.bins() * d_h;
    const double scale = std::sqrt(grid.dt());
    std::vector<double> dw(paths * stride);
    std::vector<double> dw_tilde(paths * stride);
    auto fill = [&](Stream& s, double* out) {
        for (std::size_t j = 0; j < stride; ++j)
            out[j] = scale * (mode == NoiseMode::gaussian ? s.normal() : s.sign());
    };
    for_each_index(exec, paths, [&](std::size_t m) {
        Stream a(seed, Purpose::increments, m, method);
        fill(a, dw.data() + m * stride);
        Stream b(seed, Purpose::decoupled_increments, m, method);
        fill(b, dw_tilde.data() + m * stride);
    });
    return PathBundle(grid, d_h, paths, seed, mode, std::move(dw), std::move(dw_tilde));
}

namespace {
constexpr std::array<char, 4> kMagic{'G', 'F', 'P', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& os, T v) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw IoError("path bundle file truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}
}  // namespace

void save_bundle(const PathBundle& bundle, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + file.string() + " for writing");
    os.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(os, kVersion);
    put_le<std::uint64_t>(os, bundle.paths());
    put_le<std::uint64_t>(os, bundle.grid().bins());
    put_le<std::uint64_t>(os, bundle.d_h());
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(bundle.mode()));
    put_le<std::uint64_t>(os, bundle.seed());
    for (double v : bundle.increments()) put_le<double>(os, v);
    for (double v : bundle.decoupled()) put_le<double>(os, v);
    if (!os) throw IoError("write failed for " + file.string());
}

PathBundle load_bundle(const std::filesystem::path& file, double horizon) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw IoError("cannot open " + file.string());
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic)
        throw IoError(file.string() + " is not a path bundle (bad magic)");
    const auto version = get_le<std::uint32_t>(is);
    if (version != kVersion) throw IoError("unsupported path bundle version " + std::to_string(version));
    const auto paths = get_le<std::uint64_t>(is);
    const auto bins = get_le<std::uint64_t>(is);
    const auto d_h = get_le<std::uint64_t>(is);
    const auto mode = get_le<std::uint8_t>(is);
    const auto seed = get_le<std::uint64_t>(is);
    if (mode > 1) throw IoError("unknown noise mode byte " + std::to_string(mode));
    const std::size_t n = paths * bins * d_h;
    std::vector<double> dw(n), dw_tilde(n);
    for (auto& v : dw) v = get_le<double>(is);
    for (auto& v : dw_tilde) v = get_le<double>(is);
    return PathBundle(TimeGrid(horizon, bins), d_h, paths, seed, static_cast<NoiseMode>(mode),
                      std::move(dw), std::move(dw_tilde));
}

}  // namespace gammaflow
