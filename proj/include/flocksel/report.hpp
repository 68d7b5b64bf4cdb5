#ifndef FLOCKSEL_REPORT_HPP
#define FLOCKSEL_REPORT_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "flocksel/ensemble.hpp"

namespace flocksel {

/// What one solver step did. Every quantity is evaluated at the pre-step
/// state, which makes it the left endpoint of the step for time quadrature.
struct StepReport {
  /// |u| for the filtered law; RMS of |u_i| over active agents for the
  /// pointwise law.
  double control_magnitude = 0.0;
  std::size_t active_count = 0;
  /// |u|^2 for the filtered law; (1/n) sum_i |u_i|^2 for the pointwise law.
  double control_energy = 0.0;
  /// (1/n) sum_j |v_j - v_bar|^2.
  double misalignment = 0.0;
  /// (1/n) sum_j |v_j - v_bar|^2 S_j.
  double selective_misalignment = 0.0;
};

using MicroStepReport = StepReport;

/// Called once with step 0 and the initial state (default report), then
/// after every step n = 1..M with the post-step state and that step's report.
using Observer = std::function<void(std::size_t step, double t,
                                    const Ensemble& state,
                                    const StepReport& report)>;

struct RunSummary {
  Ensemble final_state;
  std::vector<StepReport> reports;
  std::size_t steps = 0;
};

/// M = round(T / dt); throws ContractError if T < dt or T / dt is off an
/// integer by more than 1e-9 relative.
std::size_t step_count(double horizon, double dt);

}  // namespace flocksel

#endif  // FLOCKSEL_REPORT_HPP
