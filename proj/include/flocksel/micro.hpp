#ifndef FLOCKSEL_MICRO_HPP
#define FLOCKSEL_MICRO_HPP

#include <cstddef>
#include <vector>

#include "flocksel/ensemble.hpp"
#include "flocksel/kernel.hpp"
#include "flocksel/report.hpp"
#include "flocksel/rng.hpp"
#include "flocksel/selector.hpp"

namespace flocksel {

enum class ControlMode { none, filtered, pointwise };

/// Feedback law plus its penalization kappa, target velocity and selector.
struct ControlSpec {
  ControlMode mode = ControlMode::none;
  double kappa = 1.0;
  TargetState target;
  Selector selector = Selector::all();

  /// Throws ContractError if kappa <= 0 or the target is not finite.
  void validate(std::size_t dim) const;
};

/// Any coordinate beyond this magnitude counts as a blowup.
inline constexpr double kBlowupLimit = 1e12;

/// Shared control vector of the filtered law,
///   u = sum_j (v_bar - v_j) S_j / (N kappa + dt sum_j S_j^2),
/// applied to agent i as the increment dt * u * S_i.
///
/// This is the one-step MPC feedback with the penalty scaled as kappa * dt:
/// the control term of agent i, dt * S_i * sum_j (v_bar - v_j) S_j / (...),
/// is the pair sum (v_bar - v_j) S_i S_j with S_i pulled out of the sum.
/// The denominator's sum runs over the partner index j, which is the
/// trace of the rank-one matrix S_i S_j.
Vector filtered_control(const Ensemble& e, const ControlSpec& spec, double dt);

/// Overload taking precomputed selectivity values.
Vector filtered_control(const Ensemble& e, const std::vector<double>& s,
                        const ControlSpec& spec, double dt);

/// Per-agent controls of the pointwise law, flat n * dim:
/// u_i = (v_bar - v_i) / (kappa + dt) inside the selective set, 0 outside.
/// The O(dt^2) alignment correction of the one-step optimum is dropped.
std::vector<double> pointwise_control(const Ensemble& e,
                                      const ControlSpec& spec, double dt);

struct MicroStep {
  Ensemble state;
  StepReport report;
};

/// One forward Euler step of the controlled Cucker-Smale system. Positions
/// move with the pre-step velocities; alignment uses the O(N^2) pair sum
/// (1/N) sum_j H(|x_i - x_j|)(v_j - v_i) in ascending j.
/// Throws NumericalBlowup naming the first agent with a bad coordinate.
MicroStep micro_step(const Ensemble& e, const ControlSpec& spec,
                     const CommunicationKernel& k, double dt);

/// Implicit filtered step: solves
///   (Id + a b S) v' = v - a L v + a b S e v_bar,  a = dt / N, b = 1 / kappa,
/// with S_ij = S_i S_j and L the graph Laplacian of H, through the rank-one
/// inverse Id - a b / (1 + a b tr S) * S. Agrees with micro_step to O(dt^2).
Ensemble micro_step_implicit(const Ensemble& e, const ControlSpec& spec,
                             const CommunicationKernel& k, double dt);

/// M = round(T / dt) explicit steps. Variational selectors are re-centered
/// on their schedule using `rng`. Observers run after each step (and once
/// before the first). A NumericalBlowup is rethrown with its step index.
RunSummary run_micro(const Ensemble& initial, ControlSpec spec,
                     const CommunicationKernel& k, double dt, double horizon,
                     const std::vector<Observer>& observers = {},
                     RngStream rng = RngStream{0});

}  // namespace flocksel

#endif  // FLOCKSEL_MICRO_HPP
