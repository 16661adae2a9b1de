#pragma once

#include <array>
#include <cstdint>

namespace stefan {

// Philox4x32-10 counter-based generator.  Every draw in the suite is a pure
// function of (seed, counter), so ensembles are bitwise reproducible under any
// parallel partitioning and individual particles can be re-simulated on demand.
struct Philox4x32 {
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Strictly interior uniform: ((x >> 12) + 0.5) * 2^-52.  With 52 random bits
// every intermediate is exactly representable (k + 0.5 needs 53 mantissa bits
// for k < 2^52), so the result lies in [2^-53, 1 - 2^-53] with no rounding and
// log/quantile transforms never see an endpoint.  A 53-bit variant would round
// its top value up to exactly 1.0.
inline double uniform_from_bits(std::uint64_t x) {
  return (static_cast<double>(x >> 12) + 0.5) * 0x1p-52;
}

// Draw streams.  Counter layout: (step, stream kind, particle lo32, particle
// hi32); key = seed split into 32-bit halves.  Each block yields two uniforms.
class CounterRng {
 public:
  enum Kind : std::uint32_t { kPath = 0, kInit = 1 };

  explicit CounterRng(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  // Per-(particle, step) pair: first drives the Gaussian increment, second the
  // in-step bridge minimum.
  std::array<double, 2> path_pair(std::int64_t particle, std::uint32_t step) const {
    return pair(particle, step, kPath);
  }

  // Per-particle initial-condition pair (u, v).
  std::array<double, 2> init_pair(std::int64_t particle) const {
    return pair(particle, 0, kInit);
  }

 private:
  std::array<double, 2> pair(std::int64_t particle, std::uint32_t step, Kind kind) const {
    auto id = static_cast<std::uint64_t>(particle);
    Philox4x32::Block out = Philox4x32::generate(
        {step, static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(id),
         static_cast<std::uint32_t>(id >> 32)},
        key_);
    std::uint64_t w0 = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    std::uint64_t w1 = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    return {uniform_from_bits(w0), uniform_from_bits(w1)};
  }

  Philox4x32::Key key_;
};

}  // namespace stefan
