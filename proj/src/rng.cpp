#include "mixlogit/rng.hpp"

#include <cmath>

namespace mixlogit {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

// Absorb one word into a running hash; each step is a full splitmix round so
// that neighbouring keys land far apart.
inline std::uint64_t absorb(std::uint64_t h, std::uint64_t word) noexcept {
  std::uint64_t s = h ^ (word + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
  return splitmix64(s);
}

std::uint64_t stream_key(std::uint64_t master_seed, const StreamId& id) noexcept {
  std::uint64_t h = absorb(0x243F6A8885A308D3ULL, master_seed);
  h = absorb(h, static_cast<std::uint64_t>(id.purpose));
  h = absorb(h, id.iteration);
  h = absorb(h, id.chain);
  h = absorb(h, id.unit);
  return h;
}

}  // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) noexcept {
  for (auto& word : s_) word = splitmix64(seed);
}

Xoshiro256pp::result_type Xoshiro256pp::operator()() noexcept {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

RngStream::RngStream(std::uint64_t master_seed, const StreamId& id)
    : master_seed_(master_seed), id_(id), engine_(stream_key(master_seed, id)) {}

double RngStream::uniform() noexcept {
  // 53 random bits, shifted half a step off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential() noexcept { return -std::log(uniform()); }

}  // namespace mixlogit
