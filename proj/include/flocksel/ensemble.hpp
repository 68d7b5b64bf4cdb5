#ifndef FLOCKSEL_ENSEMBLE_HPP
#define FLOCKSEL_ENSEMBLE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace flocksel {

using Vector = std::vector<double>;

/// Positions and velocities of n agents (or Monte Carlo samples) in R^d.
///
/// Storage is flat and agent-major: coordinate k of agent i lives at
/// index i * dim + k of positions() / velocities(). As a set of samples the
/// ensemble stands for the empirical measure with weight 1/n per point.
class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::size_t n, std::size_t dim);
  /// n is inferred from the flat coordinate arrays (n * dim values each).
  static Ensemble from_coordinates(std::size_t dim,
                                   std::vector<double> positions,
                                   std::vector<double> velocities,
                                   double t = 0.0);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  double time() const noexcept { return t_; }
  void set_time(double t) noexcept { t_ = t; }

  std::span<double> x(std::size_t i) { return {x_.data() + i * dim_, dim_}; }
  std::span<const double> x(std::size_t i) const {
    return {x_.data() + i * dim_, dim_};
  }
  std::span<double> v(std::size_t i) { return {v_.data() + i * dim_, dim_}; }
  std::span<const double> v(std::size_t i) const {
    return {v_.data() + i * dim_, dim_};
  }

  std::vector<double>& positions() noexcept { return x_; }
  const std::vector<double>& positions() const noexcept { return x_; }
  std::vector<double>& velocities() noexcept { return v_; }
  const std::vector<double>& velocities() const noexcept { return v_; }

  /// Index of the first agent with a non-finite coordinate or one whose
  /// magnitude exceeds `limit`; size() when every coordinate is sane.
  std::size_t first_unsound(double limit) const noexcept;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> x_;
  std::vector<double> v_;
  double t_ = 0.0;
};

/// Desired flocking velocity.
struct TargetState {
  Vector v_bar;
};

double squared_distance(std::span<const double> a,
                        std::span<const double> b) noexcept;
double squared_norm(std::span<const double> a) noexcept;

}  // namespace flocksel

#endif  // FLOCKSEL_ENSEMBLE_HPP
