#include "flocksel/errors.hpp"

namespace flocksel {

namespace {

std::string blowup_message(std::size_t agent, std::size_t step) {
  std::string msg = "numerical blowup at agent " + std::to_string(agent);
  if (step != NumericalBlowup::kUnknownStep) {
    msg += " in step " + std::to_string(step);
  }
  return msg;
}

}  // namespace

NumericalBlowup::NumericalBlowup(std::size_t agent, std::size_t step)
    : std::runtime_error(blowup_message(agent, step)),
      agent_(agent),
      step_(step) {}

}  // namespace flocksel
