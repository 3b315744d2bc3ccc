#ifndef GAPLAB_RNG_HPP
#define GAPLAB_RNG_HPP

// Counter-based random numbers (Philox-4x32-10).  Streams are indexed by
// (seed, trajectory, step, domain), so any draw can be regenerated in
// isolation: trajectories can run on any thread in any order and still
// produce bit-identical results, and paired experiments can consume one
// stream from two places.

#include <array>
#include <cmath>
#include <cstdint>

namespace gaplab::rng {

inline constexpr uint32_t kPhiloxW32A = 0x9E3779B9;
inline constexpr uint32_t kPhiloxW32B = 0xBB67AE85;
inline constexpr uint32_t kPhiloxM4x32A = 0xD2511F53;
inline constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57;

inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
  for (int round = 0;; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM4x32A) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM4x32B) * ctr[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    if (round == 9) return ctr;
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
  }
}

// Uniform in (0,1) from two 32-bit words (53 significant bits, never 0 or 1).
inline double uniform_from(uint32_t a, uint32_t b) {
  const uint64_t mant =
      (static_cast<uint64_t>(a >> 6) << 27) | static_cast<uint64_t>(b >> 5);
  return (static_cast<double>(mant) + 0.5) * 0x1.0p-53;
}

// Domain tags keep independent uses of the same (seed, index) apart.
enum : uint32_t {
  kDomainNoise = 0,     // diffusion increments, indexed (trajectory, step)
  kDomainInit = 1,      // initial placements, indexed (trajectory, 0)
  kDomainSampler = 2,   // checker pair sampling, indexed (pair, draw)
};

// One logical stream: blocks are (seed | index | step | domain)-addressed.
// Layout: ctr = (index_lo, index_hi, step, domain | block << 8), so streams
// never collide while step < 2^32 and fewer than 2^24 blocks are drawn.
class Stream {
 public:
  Stream(uint64_t seed, uint64_t index, uint64_t step, uint32_t domain)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        idx_lo_(static_cast<uint32_t>(index)),
        idx_hi_(static_cast<uint32_t>(index >> 32)),
        step_(static_cast<uint32_t>(step)),
        domain_(domain) {}

  // Standard normals, Box-Muller on consecutive uniforms.  Each call of
  // next_normal consumes half a block.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto w = next_block();
    const double u1 = uniform_from(w[0], w[1]);
    const double u2 = uniform_from(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(6.283185307179586477 * u2);
    have_spare_ = true;
    return r * std::cos(6.283185307179586477 * u2);
  }

  double next_uniform() {
    const auto w = next_block();
    return uniform_from(w[0], w[1]);
  }

 private:
  std::array<uint32_t, 4> next_block() {
    const std::array<uint32_t, 4> ctr = {idx_lo_, idx_hi_, step_,
                                         domain_ | (block_ << 8)};
    ++block_;
    return philox4x32(ctr, key_);
  }

  std::array<uint32_t, 2> key_;
  uint32_t idx_lo_, idx_hi_, step_, domain_;
  uint32_t block_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gaplab::rng

#endif
