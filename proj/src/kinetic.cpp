#include "flocksel/kinetic.hpp"

#include <cmath>
#include <numbers>

#include "flocksel/diagnostics.hpp"
#include "flocksel/errors.hpp"
#include "flocksel/parallel.hpp"
#include "step_common.hpp"

namespace flocksel {

namespace {

using detail::kMaxDim;

// Writes the post-interaction velocities of pair (i, j) into out_i / out_j.
// si, sj are the selectivity values of the two samples.
void interact_pair(const double* vi, const double* vj, const double* xi,
                   const double* xj, double si, double sj, std::size_t d,
                   double alpha, const KineticConfig& cfg, double* out_i,
                   double* out_j) {
  double r2 = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double dx = xi[c] - xj[c];
    r2 += dx * dx;
  }
  const double h = cfg.kernel().of_squared(r2);
  const ControlSpec& spec = cfg.control();
  const double* v_bar = spec.target.v_bar.data();

  double coef_i = 0.0;  // K_ij = coef_i * (v_bar - w_i)
  double coef_j = 0.0;
  const double* wi = vi;  // velocity the control term of i relaxes
  const double* wj = vj;
  switch (spec.mode) {
    case ControlMode::none:
      break;
    case ControlMode::filtered: {
      const double c = 2.0 / (2.0 * spec.kappa + cfg.dt() * (si * si + sj * sj)) *
                       si * sj;
      coef_i = c;
      coef_j = c;
      wi = vj;
      wj = vi;
      break;
    }
    case ControlMode::pointwise: {
      const double c = 1.0 / (spec.kappa + cfg.dt());
      coef_i = c * si;
      coef_j = c * sj;
      break;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const double exchange = alpha * h * (vj[c] - vi[c]);
    out_i[c] = vi[c] + exchange + alpha * coef_i * (v_bar[c] - wi[c]);
    out_j[c] = vj[c] - exchange + alpha * coef_j * (v_bar[c] - wj[c]);
  }
}

Ensemble interact(const Ensemble& e, const std::vector<double>& s,
                  const KineticConfig& cfg, RngStream& rng) {
  const std::size_t n = e.size();
  const std::size_t d = e.dim();
  const std::vector<std::size_t> match = rng.permutation(n);
  const RngStream coins = rng.derive(rng.next_u64());
  const double tau = cfg.tau();
  const double alpha = cfg.alpha();

  Ensemble next = e;
  const double* x = e.positions().data();
  const double* v = e.velocities().data();
  double* out = next.velocities().data();
  parallel_for(n / 2, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      if (tau < 1.0) {
        RngStream coin = coins.derive(p);
        if (!coin.bernoulli(tau)) continue;
      }
      const std::size_t i = match[2 * p];
      const std::size_t j = match[2 * p + 1];
      interact_pair(v + i * d, v + j * d, x + i * d, x + j * d, s[i], s[j], d,
                    alpha, cfg, out + i * d, out + j * d);
    }
  });
  return next;
}

void check_config_for(const Ensemble& e, const KineticConfig& cfg) {
  detail::require_solver_dim(e);
  cfg.control().validate(e.dim());
}

void fill_control_report(const Ensemble& e, const std::vector<double>& s,
                         const KineticConfig& cfg, StepReport& report) {
  const ControlSpec& spec = cfg.control();
  detail::record_alignment(e, s, spec.target, report);
  if (spec.mode == ControlMode::none) return;
  for (double si : s) {
    if (si != 0.0) ++report.active_count;
  }
  if (spec.mode == ControlMode::filtered) {
    const Vector u = filtered_control(e, s, spec, cfg.dt());
    report.control_energy = squared_norm(u);
    report.control_magnitude = std::sqrt(report.control_energy);
    return;
  }
  const double gain = 1.0 / (spec.kappa + cfg.dt());
  double energy = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (s[i] == 0.0) continue;
    energy += gain * gain * squared_distance(e.v(i), spec.target.v_bar);
  }
  report.control_energy = energy / static_cast<double>(e.size());
  report.control_magnitude =
      report.active_count == 0
          ? 0.0
          : std::sqrt(energy / static_cast<double>(report.active_count));
}

}  // namespace

KineticConfig::KineticConfig(std::size_t n_samples, double epsilon, double dt,
                             ControlSpec control, CommunicationKernel kernel)
    : n_samples_(n_samples),
      epsilon_(epsilon),
      dt_(dt),
      control_(std::move(control)),
      kernel_(kernel) {
  if (n_samples == 0) throw ContractError("kinetic solver needs samples");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ContractError("epsilon must be positive");
  }
  if (!(dt >= 0.0)) throw ContractError("time step must be nonnegative");
  if (dt > epsilon) {
    throw ContractError("positivity requires dt <= epsilon");
  }
}

Ensemble sample_initial(const InitialCondition& ic, std::size_t n,
                        RngStream& rng) {
  if (n == 0) throw ContractError("initial sample count must be positive");
  if (ic.spatial.center.size() != 2) {
    throw ContractError("initial data is sampled in two dimensions");
  }
  if (!(ic.spatial.variance > 0.0)) {
    throw ContractError("spatial variance must be positive");
  }
  const auto* circle = std::get_if<UniformCircleVelocity>(&ic.velocity);
  const auto* point = std::get_if<PointVelocity>(&ic.velocity);
  if (circle && !(circle->radius >= 0.0)) {
    throw ContractError("circle radius must be nonnegative");
  }
  if (point && point->v.size() != 2) {
    throw ContractError("initial data is sampled in two dimensions");
  }

  const double sigma = std::sqrt(ic.spatial.variance);
  Ensemble e(n, 2);
  auto& x = e.positions();
  auto& v = e.velocities();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [g1, g2] = rng.normal_pair();
    x[2 * i] = ic.spatial.center[0] + sigma * g1;
    x[2 * i + 1] = ic.spatial.center[1] + sigma * g2;
    if (circle) {
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      if (circle->radius == 0.0) continue;
      v[2 * i] = circle->radius * std::cos(angle);
      v[2 * i + 1] = circle->radius * std::sin(angle);
    } else {
      v[2 * i] = point->v[0];
      v[2 * i + 1] = point->v[1];
    }
  }
  return e;
}

std::pair<Vector, Vector> binary_interact(std::span<const double> vi,
                                          std::span<const double> vj,
                                          std::span<const double> xi,
                                          std::span<const double> xj,
                                          double alpha,
                                          const KineticConfig& cfg, double t) {
  const std::size_t d = vi.size();
  if (d == 0 || d > kMaxDim || vj.size() != d || xi.size() != d ||
      xj.size() != d) {
    throw ContractError("binary_interact dimension mismatch");
  }
  cfg.control().validate(d);
  const double si = cfg.control().selector.value(xi, vi, t);
  const double sj = cfg.control().selector.value(xj, vj, t);
  Vector out_i(d), out_j(d);
  interact_pair(vi.data(), vj.data(), xi.data(), xj.data(), si, sj, d, alpha,
                cfg, out_i.data(), out_j.data());
  return {std::move(out_i), std::move(out_j)};
}

Ensemble interaction_step(const Ensemble& e, const KineticConfig& cfg,
                          RngStream& rng) {
  check_config_for(e, cfg);
  return interact(e, selectivity(cfg.control().selector, e), cfg, rng);
}

void transport_in_place(Ensemble& e, double dt) noexcept {
  auto& x = e.positions();
  const auto& v = e.velocities();
  for (std::size_t idx = 0; idx < x.size(); ++idx) x[idx] += dt * v[idx];
}

Ensemble transport_step(const Ensemble& e, double dt) {
  if (!(dt > 0.0)) throw ContractError("time step must be positive");
  Ensemble next = e;
  transport_in_place(next, dt);
  next.set_time(e.time() + dt);
  return next;
}

RunSummary run_kinetic(const Ensemble& initial, KineticConfig cfg,
                       double horizon, const std::vector<Observer>& observers,
                       RngStream rng) {
  check_config_for(initial, cfg);
  const double dt = cfg.dt();
  const std::size_t steps = step_count(horizon, dt);
  const std::vector<std::size_t> updates =
      schedule_steps(cfg.control().selector, horizon, dt);
  std::size_t next_update = 0;

  RunSummary summary;
  summary.steps = steps;
  summary.reports.reserve(steps);
  Ensemble state = initial;
  for (const auto& obs : observers) obs(0, state.time(), state, StepReport{});

  for (std::size_t n = 0; n < steps; ++n) {
    transport_in_place(state, dt);
    if (next_update < updates.size() && updates[next_update] == n) {
      RngStream stream = rng.derive(2, n);
      ControlSpec& spec = cfg.control();
      spec.selector =
          update_variational_center(spec.selector, state, spec.target, stream)
              .selector;
      ++next_update;
    }
    const std::vector<double> s = selectivity(cfg.control().selector, state);
    StepReport report;
    fill_control_report(state, s, cfg, report);

    RngStream stream = rng.derive(1, n);
    state = interact(state, s, cfg, stream);
    state.set_time(initial.time() + static_cast<double>(n + 1) * dt);
    const std::size_t bad = state.first_unsound(kBlowupLimit);
    if (bad != state.size()) throw NumericalBlowup(bad, n + 1);

    summary.reports.push_back(report);
    for (const auto& obs : observers) obs(n + 1, state.time(), state, report);
  }
  summary.final_state = std::move(state);
  return summary;
}

RunSummary run_kinetic(const InitialCondition& ic, KineticConfig cfg,
                       double horizon, const std::vector<Observer>& observers,
                       RngStream rng) {
  RngStream init = rng.derive(0);
  const Ensemble initial = sample_initial(ic, cfg.n_samples(), init);
  return run_kinetic(initial, std::move(cfg), horizon, observers, rng);
}

}  // namespace flocksel
