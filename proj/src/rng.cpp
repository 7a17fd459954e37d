#include "phaseret/rng.hpp"

#include <cmath>
#include <numbers>

namespace phaseret {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed),
      stream_index_(stream_index),
      state_(mix64(mix64(master_seed + 0x9e3779b97f4a7c15ull) ^
                   (stream_index + 0x632be59bd9b4e019ull))) {}

std::uint64_t RngStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ull;
  return mix64(state_);
}

double RngStream::uniform() {
  // 53-bit mantissa, shifted into (0, 1] so log() below is always finite.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

cxd RngStream::cnormal() {
  const double re = normal();
  const double im = normal();
  return cxd(re, im) * std::numbers::sqrt2 / 2.0;
}

CVec RngStream::cnormal_vector(Index n) {
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = cnormal();
  return v;
}

RVec RngStream::normal_vector(Index n) {
  RVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

std::uint64_t derive_stream(std::string_view tag, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
  std::uint64_t h = 14695981039346656037ull;
  auto eat = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (char ch : tag) eat(static_cast<unsigned char>(ch));
  for (std::uint64_t w : {a, b, c})
    for (int i = 0; i < 8; ++i) eat((w >> (8 * i)) & 0xff);
  return h;
}

}  // namespace phaseret
