#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fadesim {

// Philox4x32-10 (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += W0;
      k[1] += W1;
    }
    const std::uint64_t p0 = std::uint64_t(M0) * c[0];
    const std::uint64_t p1 = std::uint64_t(M1) * c[2];
    const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

// Standard normals addressed by (seed, stream, index). Block b of a stream yields
// normals 2b and 2b+1 through Box-Muller, so any index is reachable without state.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double at(std::uint64_t index) {
    const std::uint64_t b = index >> 1;
    if (b != block_) fill(b);
    return cache_[index & 1];
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void fill(std::uint64_t b) {
    const auto out = philox4x32({std::uint32_t(b), std::uint32_t(b >> 32), std::uint32_t(stream_),
                                 std::uint32_t(stream_ >> 32)},
                                {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
    const std::uint64_t a = (std::uint64_t(out[0]) << 32) | out[1];
    const std::uint64_t c = (std::uint64_t(out[2]) << 32) | out[3];
    // 53-bit uniforms on the open interval (0, 1)
    const double u1 = (double(a >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (double(c >> 11) + 0.5) * 0x1.0p-53;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    cache_[0] = rad * std::cos(ang);
    cache_[1] = rad * std::sin(ang);
    block_ = b;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = ~std::uint64_t(0);
  double cache_[2] = {0.0, 0.0};
};

}  // namespace fadesim
