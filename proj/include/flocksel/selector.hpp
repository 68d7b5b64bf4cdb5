#ifndef FLOCKSEL_SELECTOR_HPP
#define FLOCKSEL_SELECTOR_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flocksel/ensemble.hpp"
#include "flocksel/rng.hpp"

namespace flocksel {

enum class SelectorKind { all, none, ball, variational };

/// Which agents the control reaches: a selective function S(x, v, t) in
/// {0, 1}, read as the indicator of a selective set for the pointwise law.
///
/// A variational selector is the ball B_rho(c) around a center c that is
/// re-chosen on a piecewise-constant schedule by update_variational_center.
class Selector {
 public:
  static Selector all();
  static Selector none();
  static Selector ball(double radius);
  static Selector variational(double rho, std::size_t intervals,
                              std::size_t candidates);

  /// Grammar: `all | none | ball:R | var:RHO:L:M`.
  static Selector parse(std::string_view spec);
  std::string to_string() const;

  SelectorKind kind() const noexcept { return kind_; }
  /// R for a ball, rho for a variational selector.
  double radius() const noexcept { return radius_; }
  std::size_t intervals() const noexcept { return intervals_; }
  std::size_t candidates() const noexcept { return candidates_; }

  bool has_center() const noexcept { return center_.has_value(); }
  const Vector& center() const;
  void set_center(Vector c);

  /// Throws ContractError for a variational selector without a center.
  double value(std::span<const double> x, std::span<const double> v,
               double t) const;

 private:
  Selector(SelectorKind kind, double radius, std::size_t intervals,
           std::size_t candidates);

  SelectorKind kind_;
  double radius_ = 0.0;
  std::size_t intervals_ = 0;
  std::size_t candidates_ = 0;
  std::optional<Vector> center_;
};

double selective_value(const Selector& s, std::span<const double> x,
                       std::span<const double> v, double t);

/// S_i at the ensemble's current state, one entry per agent.
std::vector<double> selectivity(const Selector& s, const Ensemble& e);

struct CenterUpdate {
  Selector selector;
  /// The maximizing candidate's misalignment mass.
  double objective = 0.0;
  std::size_t candidates_used = 0;
  /// Set when the requested candidate count exceeded n and was clamped.
  bool clamped = false;
};

/// Monte Carlo argmax of the local misalignment mass
/// sum_{j : |x_j - c| <= rho} |v_bar - v_j|^2 / n over candidate centers c
/// drawn without replacement from the sample positions. Ties go to the
/// earliest candidate in draw order.
CenterUpdate update_variational_center(const Selector& s, const Ensemble& e,
                                       const TargetState& target,
                                       RngStream& rng);

/// tau_l = l * T / L for l = 0, ..., L - 1.
std::vector<double> schedule_updates(const Selector& s, double horizon);

/// Step indices at which a variational selector must be re-centered when
/// stepping with dt: the first step whose start time reaches each tau_l.
/// Empty for non-variational selectors.
std::vector<std::size_t> schedule_steps(const Selector& s, double horizon,
                                        double dt);

}  // namespace flocksel

#endif  // FLOCKSEL_SELECTOR_HPP
