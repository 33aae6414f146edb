#pragma once

#include <array>
#include <cstdint>

namespace heff {

// Stream-id tags keep independent consumers of the same user seed from
// colliding. A stream id is (purpose << 48) | index.
enum class StreamPurpose : std::uint64_t {
  ensemble = 1,   // one substream per ensemble realization
  search = 2,     // CMA-ES sampling
  probe = 3,      // random-sequence span probe
  cspace = 4,     // generic seeding of the C-space closure
  test = 15,
};

inline std::uint64_t make_stream(StreamPurpose purpose, std::uint64_t index) {
  return (static_cast<std::uint64_t>(purpose) << 48) | index;
}

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The 64-bit
// seed is the key; the 64-bit stream id occupies the upper counter words, so
// substreams are independent and any draw is a pure function of
// (seed, stream, position).
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint32_t next_u32();
  // Uniform on [0,1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; draws are paired deterministically.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // One 128-bit block; exposed for the known-answer test.
  static std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                            std::uint64_t stream,
                                            std::uint64_t counter);

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

}  // namespace heff
