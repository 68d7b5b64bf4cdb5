#include "flocksel/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace flocksel {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), key_(mix64(seed)) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t key) noexcept
    : seed_(seed), key_(key) {}

std::uint64_t RngStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) noexcept {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return static_cast<std::size_t>(x % range);
}

bool RngStream::bernoulli(double p) noexcept {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return uniform() < p;
}

std::pair<double, double> RngStream::normal_pair() noexcept {
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

RngStream RngStream::derive(std::uint64_t a, std::uint64_t b) const noexcept {
  const std::uint64_t key =
      mix64(key_ ^ mix64(a * kGolden + 0x632BE59BD9B4E019ull) ^
            mix64(b + 0x8CB92BA72F3D8DD7ull));
  return RngStream(seed_, key);
}

std::vector<std::size_t> RngStream::permutation(std::size_t n) noexcept {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

}  // namespace flocksel
