#pragma once

#include <array>
#include <cstdint>

namespace fusetrack {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
// Output depends only on (counter, key), so streams can be opened for any
// (seed, frame, object, purpose) tuple without shared state.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer; used to derive per-scene seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// A sequential view over the Philox counter space. The first three counter
// words identify the stream; the fourth is the draw index.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t a, std::uint32_t b = 0, std::uint32_t c = 0);

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // standard normal
  int poisson(double lambda);

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 3> stream_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fusetrack
