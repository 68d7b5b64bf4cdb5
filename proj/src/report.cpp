#include "flocksel/report.hpp"

#include <cmath>

#include "flocksel/errors.hpp"

namespace flocksel {

std::size_t step_count(double horizon, double dt) {
  if (!(dt > 0.0)) throw ContractError("time step must be positive");
  if (!(horizon >= dt)) throw ContractError("horizon must be at least dt");
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw ContractError("horizon is not an integer number of time steps");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace flocksel
