#pragma once

#include <cmath>
#include <cstdint>

namespace gridwatch::rng {

// splitmix64 (Steele, Lea, Flood 2014). Pinned here instead of <random> engines
// because std::normal_distribution's algorithm is implementation-defined and
// frozen test constants must survive standard-library changes.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic substream derivation: the same (seed, salt) pair always maps
/// to the same child seed, and distinct salts decorrelate streams.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (salt * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL);
  (void)splitmix64(s);
  return splitmix64(s);
}

// Stream salts for the independent random consumers. Values are arbitrary but
// frozen: changing them changes every seeded artifact.
enum Salt : std::uint64_t {
  salt_noise_column = 0x6e6f6973ULL,   // white-noise injection, one stream per matrix column
  salt_scenario_row = 0x7363656eULL,   // scenario jitter, one stream per row
  salt_ring_tick = 0x72696e67ULL,      // Haar factor of the ring product, one stream per tick
  salt_haar = 0x68616172ULL,           // direct singular_value_equivalent calls
  salt_generic = 0x67656e65ULL,
};

/// Minimal deterministic generator: uniforms via the top 53 bits, Gaussians via
/// Box-Muller (pair-cached). Not cryptographic; statistical quality is ample
/// for Monte-Carlo spectra.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform on (0,1]: never returns 0 so log() below is safe.
  double uniform01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gridwatch::rng
