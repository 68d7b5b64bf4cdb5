#ifndef FLOCKSEL_SRC_STEP_COMMON_HPP
#define FLOCKSEL_SRC_STEP_COMMON_HPP

#include <cstddef>
#include <vector>

#include "flocksel/ensemble.hpp"
#include "flocksel/errors.hpp"
#include "flocksel/micro.hpp"
#include "flocksel/report.hpp"

namespace flocksel::detail {

inline constexpr std::size_t kMaxDim = 3;

inline void require_solver_dim(const Ensemble& e) {
  if (e.dim() == 0 || e.dim() > kMaxDim) {
    throw ContractError("solvers support dimensions 1 to 3");
  }
}

/// Fills the misalignment fields of a report from the pre-step state.
inline void record_alignment(const Ensemble& e, const std::vector<double>& s,
                             const TargetState& target, StepReport& report) {
  double total = 0.0;
  double selected = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double w = squared_distance(e.v(i), target.v_bar);
    total += w;
    selected += w * s[i];
  }
  const double inv_n = 1.0 / static_cast<double>(e.size());
  report.misalignment = total * inv_n;
  report.selective_misalignment = selected * inv_n;
}

inline void check_sound(const Ensemble& e) {
  const std::size_t bad = e.first_unsound(kBlowupLimit);
  if (bad != e.size()) throw NumericalBlowup(bad);
}

}  // namespace flocksel::detail

#endif  // FLOCKSEL_SRC_STEP_COMMON_HPP
