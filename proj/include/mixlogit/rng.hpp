#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace mixlogit {

/// What a stream is used for. Mixed into the stream key so that, e.g., the
/// beta proposals of iteration 7 never share draws with the phi draws of
/// iteration 7.
enum class Purpose : std::uint32_t {
  kInit = 1,
  kA,
  kOmega,
  kZeta,
  kBeta,
  kAlpha,
  kPhi,
  kCovariates,
  kChoices,
  kTruth,
  kGeweke,
  kTest,
};

/// Identifies one independent random stream under a master seed.
struct StreamId {
  Purpose purpose = Purpose::kTest;
  std::uint64_t iteration = 0;
  std::uint64_t chain = 0;
  std::uint64_t unit = 0;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256++ engine. Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0x9E3779B97F4A7C15ULL) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// A reproducible random stream. Two streams built from the same
/// (master_seed, StreamId) produce bit-identical sequences.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, const StreamId& id);

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal();
  /// Exponential with rate 1.
  double exponential() noexcept;

  Xoshiro256pp& engine() noexcept { return engine_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const StreamId& id() const noexcept { return id_; }

 private:
  std::uint64_t master_seed_;
  StreamId id_;
  Xoshiro256pp engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mixlogit
