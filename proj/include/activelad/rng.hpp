#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace activelad {

/// Seeded, splittable random stream.
///
/// The generator is xoshiro256** whose 256-bit state is filled by SplitMix64
/// from a key derived from (seed, stream, substream). Normals use the Marsaglia
/// polar method and integer ranges use Lemire's multiply-shift. Nothing goes
/// through <random> distributions, so sequences match across platforms.
class RngStream {
 public:
  static constexpr std::string_view kAlgorithm = "xoshiro256**/splitmix64";

  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0,
                     std::uint64_t substream = 0);

  /// Independent child stream identified by a purpose tag and an index
  /// (for example ("trial", 17)). Does not advance *this.
  RngStream derive(std::string_view purpose, std::uint64_t index = 0) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t substream() const noexcept { return substream_; }

  std::uint64_t next_u64() noexcept;
  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept;
  double normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t substream_;
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace activelad
