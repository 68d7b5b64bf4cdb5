#include "flocksel/micro.hpp"

#include <array>
#include <cmath>

#include "flocksel/diagnostics.hpp"
#include "flocksel/errors.hpp"
#include "flocksel/parallel.hpp"
#include "step_common.hpp"

namespace flocksel {

namespace {

using detail::kMaxDim;

// dt * (1/N) sum_j H_ij (v_j - v_i), flat n * dim, j ascending per agent.
std::vector<double> alignment_increment(const Ensemble& e,
                                        const CommunicationKernel& k,
                                        double dt) {
  const std::size_t n = e.size();
  const std::size_t d = e.dim();
  const double scale = dt / static_cast<double>(n);
  const double* x = e.positions().data();
  const double* v = e.velocities().data();
  std::vector<double> out(n * d, 0.0);
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          std::array<double, kMaxDim> acc{};
          const double* xi = x + i * d;
          const double* vi = v + i * d;
          for (std::size_t j = 0; j < n; ++j) {
            const double* xj = x + j * d;
            double r2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
              const double dx = xi[c] - xj[c];
              r2 += dx * dx;
            }
            const double h = k.of_squared(r2);
            const double* vj = v + j * d;
            for (std::size_t c = 0; c < d; ++c) acc[c] += h * (vj[c] - vi[c]);
          }
          for (std::size_t c = 0; c < d; ++c) out[i * d + c] = scale * acc[c];
        }
      },
      16);
  return out;
}

void check_target(const ControlSpec& spec, const Ensemble& e) {
  detail::require_solver_dim(e);
  spec.validate(e.dim());
}

}  // namespace

void ControlSpec::validate(std::size_t dim) const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw ContractError("penalization kappa must be positive");
  }
  if (target.v_bar.size() != dim) {
    throw ContractError("target velocity dimension mismatch");
  }
  for (double c : target.v_bar) {
    if (!std::isfinite(c)) throw ContractError("target velocity not finite");
  }
}

Vector filtered_control(const Ensemble& e, const std::vector<double>& s,
                        const ControlSpec& spec, double dt) {
  const std::size_t d = e.dim();
  Vector u(d, 0.0);
  double s2 = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (s[j] == 0.0) continue;
    const auto vj = e.v(j);
    for (std::size_t c = 0; c < d; ++c) {
      u[c] += (spec.target.v_bar[c] - vj[c]) * s[j];
    }
    s2 += s[j] * s[j];
  }
  const double denom = static_cast<double>(e.size()) * spec.kappa + dt * s2;
  for (double& c : u) c /= denom;
  return u;
}

Vector filtered_control(const Ensemble& e, const ControlSpec& spec,
                        double dt) {
  check_target(spec, e);
  return filtered_control(e, selectivity(spec.selector, e), spec, dt);
}

std::vector<double> pointwise_control(const Ensemble& e,
                                      const ControlSpec& spec, double dt) {
  check_target(spec, e);
  const std::size_t d = e.dim();
  const double gain = 1.0 / (spec.kappa + dt);
  std::vector<double> u(e.size() * d, 0.0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (spec.selector.value(e.x(i), e.v(i), e.time()) == 0.0) continue;
    const auto vi = e.v(i);
    for (std::size_t c = 0; c < d; ++c) {
      u[i * d + c] = gain * (spec.target.v_bar[c] - vi[c]);
    }
  }
  return u;
}

MicroStep micro_step(const Ensemble& e, const ControlSpec& spec,
                     const CommunicationKernel& k, double dt) {
  check_target(spec, e);
  if (!(dt > 0.0)) throw ContractError("time step must be positive");
  const std::size_t n = e.size();
  const std::size_t d = e.dim();

  const std::vector<double> s = selectivity(spec.selector, e);
  StepReport report;
  detail::record_alignment(e, s, spec.target, report);

  std::vector<double> dv = alignment_increment(e, k, dt);
  switch (spec.mode) {
    case ControlMode::none:
      break;
    case ControlMode::filtered: {
      const Vector u = filtered_control(e, s, spec, dt);
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] == 0.0) continue;
        ++report.active_count;
        for (std::size_t c = 0; c < d; ++c) dv[i * d + c] += dt * u[c] * s[i];
      }
      report.control_energy = squared_norm(u);
      report.control_magnitude = std::sqrt(report.control_energy);
      break;
    }
    case ControlMode::pointwise: {
      const double gain = 1.0 / (spec.kappa + dt);
      double energy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] == 0.0) continue;
        ++report.active_count;
        const auto vi = e.v(i);
        for (std::size_t c = 0; c < d; ++c) {
          const double ui = gain * (spec.target.v_bar[c] - vi[c]);
          dv[i * d + c] += dt * ui;
          energy += ui * ui;
        }
      }
      report.control_energy = energy / static_cast<double>(n);
      report.control_magnitude =
          report.active_count == 0
              ? 0.0
              : std::sqrt(energy / static_cast<double>(report.active_count));
      break;
    }
  }

  Ensemble next = e;
  auto& x = next.positions();
  auto& v = next.velocities();
  for (std::size_t idx = 0; idx < n * d; ++idx) {
    x[idx] += dt * e.velocities()[idx];
    v[idx] += dv[idx];
  }
  next.set_time(e.time() + dt);
  detail::check_sound(next);
  return {std::move(next), report};
}

Ensemble micro_step_implicit(const Ensemble& e, const ControlSpec& spec,
                             const CommunicationKernel& k, double dt) {
  check_target(spec, e);
  if (spec.mode != ControlMode::filtered) {
    throw ContractError("the implicit step is defined for the filtered law");
  }
  if (!(dt > 0.0)) throw ContractError("time step must be positive");
  const std::size_t n = e.size();
  const std::size_t d = e.dim();
  const std::vector<double> s = selectivity(spec.selector, e);

  // a b = (dt / N)(1 / kappa); S = s s^T so S e = s (sum s) and tr S = |s|^2.
  const double ab = dt / (static_cast<double>(n) * spec.kappa);
  double sum_s = 0.0;
  double trace = 0.0;
  for (double si : s) {
    sum_s += si;
    trace += si * si;
  }

  // b = v - a L v + a b S e v_bar; -a L v is the alignment increment.
  std::vector<double> rhs = alignment_increment(e, k, dt);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      rhs[i * d + c] += e.v(i)[c] + ab * s[i] * sum_s * spec.target.v_bar[c];
    }
  }

  // v' = b - [a b / (1 + a b tr S)] s (s . b)
  std::array<double, kMaxDim> proj{};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < d; ++c) proj[c] += s[j] * rhs[j * d + c];
  }
  const double factor = ab / (1.0 + ab * trace);
  Ensemble next = e;
  auto& x = next.positions();
  auto& v = next.velocities();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      x[i * d + c] += dt * e.v(i)[c];
      v[i * d + c] = rhs[i * d + c] - factor * s[i] * proj[c];
    }
  }
  next.set_time(e.time() + dt);
  detail::check_sound(next);
  return next;
}

RunSummary run_micro(const Ensemble& initial, ControlSpec spec,
                     const CommunicationKernel& k, double dt, double horizon,
                     const std::vector<Observer>& observers, RngStream rng) {
  check_target(spec, initial);
  const std::size_t steps = step_count(horizon, dt);
  const std::vector<std::size_t> updates =
      schedule_steps(spec.selector, horizon, dt);
  std::size_t next_update = 0;

  RunSummary summary;
  summary.steps = steps;
  summary.reports.reserve(steps);
  Ensemble state = initial;
  for (const auto& obs : observers) obs(0, state.time(), state, StepReport{});

  for (std::size_t n = 0; n < steps; ++n) {
    if (next_update < updates.size() && updates[next_update] == n) {
      RngStream stream = rng.derive(2, n);
      spec.selector = update_variational_center(spec.selector, state,
                                                spec.target, stream)
                          .selector;
      ++next_update;
    }
    MicroStep step;
    try {
      step = micro_step(state, spec, k, dt);
    } catch (const NumericalBlowup& err) {
      throw NumericalBlowup(err.agent(), n + 1);
    }
    // Accumulated time drifts; pin it to the grid.
    step.state.set_time(initial.time() + static_cast<double>(n + 1) * dt);
    state = std::move(step.state);
    summary.reports.push_back(step.report);
    for (const auto& obs : observers) {
      obs(n + 1, state.time(), state, step.report);
    }
  }
  summary.final_state = std::move(state);
  return summary;
}

}  // namespace flocksel
