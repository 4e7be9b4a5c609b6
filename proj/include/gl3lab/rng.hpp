#pragma once

#include <array>
#include <cstdint>

namespace gl3lab {

// Philox4x32-10 (Salmon et al., SC'11). A counter-based generator: the output
// is a pure function of (key, counter), so any draw can be regenerated
// without replaying a stream.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Uniform [0,1) variate keyed by (seed, draw, stream). The keying is part of
// the reproducibility contract of the random model: the same triple always
// yields the same number regardless of evaluation order or thread count.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t draw,
                            std::uint64_t stream) {
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr = {
      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32)};
  const auto out = Philox4x32::generate(ctr, key);
  const std::uint64_t bits =
      (std::uint64_t{out[0]} << 32 | std::uint64_t{out[1]}) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace gl3lab
