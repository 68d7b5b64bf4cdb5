#include "flocksel/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "flocksel/errors.hpp"

namespace flocksel {

CommunicationKernel::CommunicationKernel(double gamma) : gamma_(gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ContractError("kernel exponent gamma must be finite and >= 0");
  }
  if (gamma == 0.0) {
    path_ = Path::constant;
  } else if (gamma == 0.5) {
    path_ = Path::inverse_sqrt;
  } else if (gamma == std::floor(gamma) && gamma <= 64.0) {
    path_ = Path::integer_power;
    power_ = static_cast<unsigned>(gamma);
  } else {
    path_ = Path::general;
  }
}

double CommunicationKernel::operator()(double r) const {
  if (r < 0.0 || std::isnan(r)) {
    throw std::domain_error("kernel distance must be nonnegative");
  }
  return of_squared(r * r);
}

double CommunicationKernel::of_squared(double r2) const noexcept {
  switch (path_) {
    case Path::constant:
      return 1.0;
    case Path::inverse_sqrt:
      return 1.0 / std::sqrt(1.0 + r2);
    case Path::integer_power: {
      double base = 1.0 / (1.0 + r2);
      double result = 1.0;
      for (unsigned p = power_; p != 0; p >>= 1) {
        if (p & 1u) result *= base;
        base *= base;
      }
      return result;
    }
    case Path::general:
      break;
  }
  return std::pow(1.0 + r2, -gamma_);
}

}  // namespace flocksel
