#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace gbspe {

/// Counter-based random stream. Output i of a stream is a fixed hash of
/// (key, i), so a stream is fully determined by its seed and the number of
/// values already drawn. `derive` splits off an independent child stream
/// whose key depends only on the parent key and the child index, never on
/// how far the parent has advanced.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  RngStream derive(std::uint64_t index) const;

  /// Uniform double in the open interval (0, 1).
  double uniform01();
  double normal();

  std::uint64_t key() const noexcept { return key_; }

 private:
  struct FromKey {};
  RngStream(FromKey, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t mix64(std::uint64_t x);

/// Combines a seed with a list of integer tags into a new seed.
std::uint64_t combine_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

}  // namespace gbspe
