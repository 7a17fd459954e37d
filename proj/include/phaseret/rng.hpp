#pragma once

#include <cstdint>
#include <string_view>

#include "phaseret/types.hpp"

namespace phaseret {

// Counter-based stream: the draw sequence is a pure function of
// (master_seed, stream_index), so equal pairs replay bit-for-bit on any
// platform. Normal variates come from Box-Muller on 53-bit uniforms; complex
// normals draw the real part first.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t next_u64();
  double uniform();  // (0, 1]
  double normal();   // N(0, 1)
  cxd cnormal();     // proper complex, E|z|^2 = 1

  CVec cnormal_vector(Index n);
  RVec normal_vector(Index n);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// FNV-1a over the tag bytes then the little-endian words; collision-free
// enough to key independent experiment streams by (label, cell, trial).
std::uint64_t derive_stream(std::string_view tag, std::uint64_t a = 0, std::uint64_t b = 0,
                            std::uint64_t c = 0);

}  // namespace phaseret
