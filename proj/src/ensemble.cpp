#include "flocksel/ensemble.hpp"

#include <cmath>

#include "flocksel/errors.hpp"

namespace flocksel {

Ensemble::Ensemble(std::size_t n, std::size_t dim)
    : n_(n), dim_(dim), x_(n * dim, 0.0), v_(n * dim, 0.0) {
  if (dim == 0) throw ContractError("ensemble dimension must be positive");
}

Ensemble Ensemble::from_coordinates(std::size_t dim,
                                    std::vector<double> positions,
                                    std::vector<double> velocities, double t) {
  if (dim == 0) throw ContractError("ensemble dimension must be positive");
  if (positions.size() != velocities.size() || positions.size() % dim != 0) {
    throw ContractError("positions and velocities must hold n * dim values");
  }
  Ensemble e;
  e.dim_ = dim;
  e.n_ = positions.size() / dim;
  e.x_ = std::move(positions);
  e.v_ = std::move(velocities);
  e.t_ = t;
  return e;
}

std::size_t Ensemble::first_unsound(double limit) const noexcept {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const double a = x_[i * dim_ + k];
      const double b = v_[i * dim_ + k];
      if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a) > limit ||
          std::abs(b) > limit) {
        return i;
      }
    }
  }
  return n_;
}

double squared_distance(std::span<const double> a,
                        std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double squared_norm(std::span<const double> a) noexcept {
  double s = 0.0;
  for (double c : a) s += c * c;
  return s;
}

}  // namespace flocksel
