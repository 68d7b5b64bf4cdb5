#ifndef FLOCKSEL_KINETIC_HPP
#define FLOCKSEL_KINETIC_HPP

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "flocksel/ensemble.hpp"
#include "flocksel/kernel.hpp"
#include "flocksel/micro.hpp"
#include "flocksel/report.hpp"
#include "flocksel/rng.hpp"

namespace flocksel {

/// Parameters of the binary-interaction Monte Carlo solver.
///
/// Grazing scaling: interaction rate 1/epsilon, strength alpha = epsilon, so
/// a fraction tau = dt / epsilon of the matched pairs interacts per step.
class KineticConfig {
 public:
  /// Throws ContractError unless n_samples >= 1, epsilon > 0,
  /// 0 <= dt <= epsilon. dt = 0 is accepted (no interaction happens).
  KineticConfig(std::size_t n_samples, double epsilon, double dt,
                ControlSpec control, CommunicationKernel kernel);

  std::size_t n_samples() const noexcept { return n_samples_; }
  double epsilon() const noexcept { return epsilon_; }
  double dt() const noexcept { return dt_; }
  double alpha() const noexcept { return epsilon_; }
  double tau() const noexcept { return dt_ / epsilon_; }
  const ControlSpec& control() const noexcept { return control_; }
  ControlSpec& control() noexcept { return control_; }
  const CommunicationKernel& kernel() const noexcept { return kernel_; }

 private:
  std::size_t n_samples_;
  double epsilon_;
  double dt_;
  ControlSpec control_;
  CommunicationKernel kernel_;
};

struct GaussianSpace {
  Vector center{0.0, 0.0};
  double variance = 1.0;
};

struct UniformCircleVelocity {
  double radius = 5.0;
};

struct PointVelocity {
  Vector v{0.0, 0.0};
};

struct InitialCondition {
  GaussianSpace spatial;
  std::variant<UniformCircleVelocity, PointVelocity> velocity;
};

/// x_i ~ N(center, variance Id), v_i uniform on the circle (2-d only).
/// Samples are drawn one agent at a time, so a run with n samples sees the
/// first n samples of any larger draw from the same stream.
Ensemble sample_initial(const InitialCondition& ic, std::size_t n,
                        RngStream& rng);

/// Post-interaction velocities of the pair (i, j):
///   v_i* = v_i + alpha H_ij (v_j - v_i) + alpha K_ij   (and symmetrically),
/// with K_ij from the control mode of cfg:
///   filtered:  2 / (2 kappa + dt (S_i^2 + S_j^2)) (v_bar - v_j) S_i S_j
///   pointwise: 1 / (kappa + dt) (v_bar - v_i) chi_i
std::pair<Vector, Vector> binary_interact(std::span<const double> vi,
                                          std::span<const double> vj,
                                          std::span<const double> xi,
                                          std::span<const double> xj,
                                          double alpha,
                                          const KineticConfig& cfg, double t);

/// Step (I): one uniformly random perfect matching; each pair interacts with
/// probability tau (both partners or neither). With an odd count the
/// sample left over by the matching idles.
///
/// The matching comes from `rng` sequentially; per-pair coins come from a
/// stream derived from (rng, pair index), so pair updates run in parallel
/// without changing the result.
Ensemble interaction_step(const Ensemble& e, const KineticConfig& cfg,
                          RngStream& rng);

/// Step (T): x_i += dt v_i.
Ensemble transport_step(const Ensemble& e, double dt);
void transport_in_place(Ensemble& e, double dt) noexcept;

/// Samples the initial data and alternates transport then interaction for
/// M = round(T / dt) steps. Controls and selectors see the post-transport
/// state of each step.
RunSummary run_kinetic(const InitialCondition& ic, KineticConfig cfg,
                       double horizon,
                       const std::vector<Observer>& observers = {},
                       RngStream rng = RngStream{0});

/// Same, starting from a given sample set instead of sampling one.
RunSummary run_kinetic(const Ensemble& initial, KineticConfig cfg,
                       double horizon,
                       const std::vector<Observer>& observers = {},
                       RngStream rng = RngStream{0});

}  // namespace flocksel

#endif  // FLOCKSEL_KINETIC_HPP
