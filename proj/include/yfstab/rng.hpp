#pragma once

// Philox4x32-10 counter-based generator. A stream is addressed by
// (key = seed, counter = sample index, block), so any sample can be
// regenerated independently of how work is split between threads.

#include <array>
#include <cmath>
#include <cstdint>

namespace yfstab {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  static Block generate(Block ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  Block operator()(std::uint64_t index, std::uint32_t block) const {
    return generate({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), block, 0u}, key_);
  }

  /// Uniform in the open interval (0, 1).
  static double to_unit(std::uint32_t x) { return (static_cast<double>(x) + 0.5) * 0x1p-32; }

  /// Eight standard normals for sample `index` (Box-Muller on two blocks).
  std::array<double, 8> normals(std::uint64_t index) const {
    std::array<double, 8> out{};
    for (std::uint32_t b = 0; b < 2; ++b) {
      const Block u = (*this)(index, b);
      for (int i = 0; i < 2; ++i) {
        const double r = std::sqrt(-2.0 * std::log(to_unit(u[2 * i])));
        const double phi = 2.0 * M_PI * to_unit(u[2 * i + 1]);
        out[4 * b + 2 * i] = r * std::cos(phi);
        out[4 * b + 2 * i + 1] = r * std::sin(phi);
      }
    }
    return out;
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace yfstab
