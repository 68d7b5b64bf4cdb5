#include "flocksel/cost.hpp"

#include <ostream>

#include "flocksel/csv.hpp"
#include "flocksel/diagnostics.hpp"
#include "flocksel/errors.hpp"

namespace flocksel {

double running_cost_filtered(const Ensemble& e, std::span<const double> u,
                             double kappa, const TargetState& target) {
  if (u.size() != e.dim()) throw ContractError("control dimension mismatch");
  return misalignment(e, target) + kappa * squared_norm(u);
}

double running_cost_pointwise(const Ensemble& e, std::span<const double> u,
                              double kappa, const TargetState& target) {
  if (u.size() != e.size() * e.dim()) {
    throw ContractError("pointwise controls need one vector per agent");
  }
  return misalignment(e, target) +
         kappa * squared_norm(u) / static_cast<double>(e.size());
}

CostAccumulator::CostAccumulator(double kappa, double dt, TargetState target)
    : kappa_(kappa), dt_(dt), target_(std::move(target)) {
  if (!(dt > 0.0)) throw ContractError("time step must be positive");
}

void CostAccumulator::observe(std::size_t step, double t, const Ensemble& state,
                              const StepReport& report) {
  trace_.alignment_final = misalignment(state, target_);
  const double left = last_time_;
  last_time_ = t;
  if (step == 0) return;
  const double running = report.misalignment + kappa_ * report.control_energy;
  trace_.times.push_back(left);
  trace_.running.push_back(running);
  trace_.total += dt_ * running;
  trace_.cumulative.push_back(trace_.total);
  trace_.selective.push_back(report.selective_misalignment);
}

Observer CostAccumulator::observer() {
  return [this](std::size_t step, double t, const Ensemble& state,
                const StepReport& report) { observe(step, t, state, report); };
}

SweepMetrics sweep_metrics(const CostTrace& trace, double kappa, double dt,
                           double horizon) {
  if (!(kappa > 0.0) || !(horizon > 0.0)) {
    throw ContractError("sweep metrics need kappa > 0 and T > 0");
  }
  double integral = 0.0;
  for (double s : trace.selective) integral += dt * s;
  return {trace.alignment_final, integral / (kappa * horizon)};
}

void write_cost_csv(std::ostream& out, const CostTrace& trace) {
  out << "t,running,cumulative\n";
  for (std::size_t k = 0; k < trace.running.size(); ++k) {
    out << format_real(trace.times[k]) << ',' << format_real(trace.running[k])
        << ',' << format_real(trace.cumulative[k]) << '\n';
  }
}

}  // namespace flocksel
