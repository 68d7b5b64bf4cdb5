#ifndef FLOCKSEL_COST_HPP
#define FLOCKSEL_COST_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "flocksel/ensemble.hpp"
#include "flocksel/report.hpp"

namespace flocksel {

/// L[f, xi] = (1/n) sum_j |v_j - v_bar|^2 + kappa |u|^2, u the shared control.
double running_cost_filtered(const Ensemble& e, std::span<const double> u,
                             double kappa, const TargetState& target);

/// L[f, zeta] = (1/n) sum_j (|v_j - v_bar|^2 + kappa |u_j|^2), u flat n * dim
/// with zeros for unselected agents.
double running_cost_pointwise(const Ensemble& e, std::span<const double> u,
                              double kappa, const TargetState& target);

struct CostTrace {
  std::vector<double> times;
  std::vector<double> running;
  std::vector<double> cumulative;
  /// S-weighted misalignment per step, the integrand of the sweep cost C.
  std::vector<double> selective;
  /// C_T, left-endpoint rectangle rule.
  double total = 0.0;
  /// A: misalignment of the latest observed state.
  double alignment_final = 0.0;
};

/// Observer that integrates the running cost. Entry k of the trace is the
/// left endpoint t_k of step k + 1.
class CostAccumulator {
 public:
  CostAccumulator(double kappa, double dt, TargetState target);

  void observe(std::size_t step, double t, const Ensemble& state,
               const StepReport& report);
  Observer observer();

  const CostTrace& trace() const noexcept { return trace_; }

 private:
  double kappa_;
  double dt_;
  TargetState target_;
  CostTrace trace_;
  double last_time_ = 0.0;
};

struct SweepMetrics {
  /// Misalignment at the horizon.
  double alignment = 0.0;
  /// (1 / (kappa T)) int_0^T int |v - v_bar|^2 S f dx dv dt.
  double control_cost = 0.0;
};

SweepMetrics sweep_metrics(const CostTrace& trace, double kappa, double dt,
                           double horizon);

/// Header `t,running,cumulative`.
void write_cost_csv(std::ostream& out, const CostTrace& trace);

}  // namespace flocksel

#endif  // FLOCKSEL_COST_HPP
