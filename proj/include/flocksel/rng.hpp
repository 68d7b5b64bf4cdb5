#ifndef FLOCKSEL_RNG_HPP
#define FLOCKSEL_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace flocksel {

/// Counter-based generator (SplitMix64 finalizer over a keyed counter).
///
/// The output depends only on (key, counter), so independent streams can be
/// split off deterministically with derive(), e.g. one stream per
/// (step, particle). All conversions to reals are done here rather than via
/// <random> distributions, whose algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept;

  bool bernoulli(double p) noexcept;

  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair() noexcept;

  /// Independent child stream labelled by (a, b). Does not advance *this.
  RngStream derive(std::uint64_t a, std::uint64_t b = 0) const noexcept;

  /// Uniformly random permutation of {0, ..., n - 1} (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n) noexcept;

 private:
  RngStream(std::uint64_t seed, std::uint64_t key) noexcept;

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace flocksel

#endif  // FLOCKSEL_RNG_HPP
