#pragma once

#include <array>
#include <cstdint>

namespace ertadapt {

/// Counter-based Philox4x32-10 generator.
///
/// A draw is a pure function of (key, counter), so any sample index can be
/// generated independently of every other one.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key) : key_{static_cast<std::uint32_t>(key),
                                                  static_cast<std::uint32_t>(key >> 32)} {}

    Block operator()(Block counter) const;

private:
    std::array<std::uint32_t, 2> key_;
};

/// Uniform in the open interval (0, 1) for stream (seed, index, channel).
/// 53 random bits, centred in their bin so 0 and 1 are never returned.
double uniform_open(std::uint64_t seed, std::uint64_t index, std::uint32_t channel);

/// Standard normal by inverse CDF of uniform_open: one uniform per draw.
double standard_normal(std::uint64_t seed, std::uint64_t index, std::uint32_t channel);

/// Derives an independent 64-bit seed from a base seed and two tags.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b = 0);

}  // namespace ertadapt
