#ifndef FLOCKSEL_ERRORS_HPP
#define FLOCKSEL_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flocksel {

/// Violated precondition of a public operation (bad sizes, bad parameters).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver produced a non-finite or runaway coordinate.
class NumericalBlowup : public std::runtime_error {
 public:
  static constexpr std::size_t kUnknownStep = static_cast<std::size_t>(-1);

  NumericalBlowup(std::size_t agent, std::size_t step = kUnknownStep);

  std::size_t agent() const noexcept { return agent_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t agent_;
  std::size_t step_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flocksel

#endif  // FLOCKSEL_ERRORS_HPP
