#include <cmath>
#include <vector>

#include "doctest.h"
#include "flocksel/diagnostics.hpp"
#include "flocksel/errors.hpp"
#include "flocksel/micro.hpp"
#include "flocksel/parallel.hpp"
#include "test_support.hpp"

using namespace flocksel;
using flocksel::testing::max_abs_diff;
using flocksel::testing::random_ensemble;

namespace {

ControlSpec spec_of(ControlMode mode, double kappa, Selector sel = Selector::all()) {
  ControlSpec s;
  s.mode = mode;
  s.kappa = kappa;
  s.target = TargetState{{1.0, 1.0}};
  s.selector = std::move(sel);
  return s;
}

Ensemble single(double vx, double vy) {
  return Ensemble::from_coordinates(2, {0.0, 0.0}, {vx, vy});
}

// Dense Gaussian elimination with partial pivoting, n x n, multiple rhs.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b,
                                std::size_t n, std::size_t m) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
    for (std::size_t c = 0; c < m; ++c) std::swap(b[col * m + c], b[piv * m + c]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      for (std::size_t c = 0; c < m; ++c) b[r * m + c] -= f * b[col * m + c];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      double acc = b[r * m + c];
      for (std::size_t k = r + 1; k < n; ++k) acc -= a[r * n + k] * b[k * m + c];
      b[r * m + c] = acc / a[r * n + r];
    }
  }
  return b;
}

}  // namespace

TEST_CASE("filtered control examples") {
  const auto s = spec_of(ControlMode::filtered, 1.0);
  const Vector u = filtered_control(single(0, 0), s, 0.1);
  CHECK(u[0] == doctest::Approx(1.0 / 1.1));
  CHECK(u[1] == doctest::Approx(0.9091).epsilon(1e-4));

  const auto none = spec_of(ControlMode::filtered, 1.0, Selector::none());
  const Ensemble e = random_ensemble(30, 2, 2);
  CHECK(filtered_control(e, none, 0.1) == Vector{0.0, 0.0});

  Ensemble aligned = e;
  for (double& c : aligned.velocities()) c = 1.0;
  CHECK(filtered_control(aligned, s, 0.1) == Vector{0.0, 0.0});
}

TEST_CASE("pointwise control examples") {
  const auto s = spec_of(ControlMode::pointwise, 1.0);
  const auto u = pointwise_control(single(0, 0), s, 0.1);
  CHECK(0.1 * u[0] == doctest::Approx(0.1 / 1.1));
  CHECK(0.1 * u[1] == doctest::Approx(0.0909).epsilon(1e-3));

  const Ensemble e = random_ensemble(30, 2, 3);
  const auto empty = pointwise_control(e, spec_of(ControlMode::pointwise, 1.0, Selector::none()), 0.1);
  for (double c : empty) CHECK(c == 0.0);

  CHECK(pointwise_control(single(1, 1), s, 0.1) == std::vector<double>{0.0, 0.0});

  // Outside the ball the control vanishes.
  const Ensemble far = Ensemble::from_coordinates(2, {0.0, 0.0, 9.0, 0.0}, {0.0, 0.0, 0.0, 0.0});
  const auto mixed = pointwise_control(far, spec_of(ControlMode::pointwise, 1.0, Selector::ball(5.0)), 0.1);
  CHECK(mixed[0] > 0.0);
  CHECK(mixed[2] == 0.0);
  CHECK(mixed[3] == 0.0);
}

TEST_CASE("control spec contract") {
  auto s = spec_of(ControlMode::filtered, 0.0);
  CHECK_THROWS_AS(filtered_control(single(0, 0), s, 0.1), ContractError);
  s.kappa = 1.0;
  s.target.v_bar = {1.0};
  CHECK_THROWS_AS(filtered_control(single(0, 0), s, 0.1), ContractError);
  CHECK_THROWS_AS(micro_step(single(0, 0), spec_of(ControlMode::none, 1.0),
                             CommunicationKernel(0.0), 0.0),
                  ContractError);
}

TEST_CASE("micro step examples") {
  const CommunicationKernel k0(0.0);
  const auto none = spec_of(ControlMode::none, 1.0);

  const auto one = micro_step(Ensemble::from_coordinates(2, {1.0, 2.0}, {3.0, -1.0}), none, k0, 0.1);
  CHECK(one.state.v(0)[0] == 3.0);
  CHECK(one.state.v(0)[1] == -1.0);
  CHECK(one.state.x(0)[0] == doctest::Approx(1.3));
  CHECK(one.state.x(0)[1] == doctest::Approx(1.9));
  CHECK(one.state.time() == doctest::Approx(0.1));

  const Ensemble two = Ensemble::from_coordinates(2, {0.0, 0.0, 1.0, 0.0}, {1.0, 0.0, -1.0, 0.0});
  const auto step = micro_step(two, none, k0, 0.1);
  CHECK(step.state.v(0)[0] == doctest::Approx(0.9));
  CHECK(step.state.v(1)[0] == doctest::Approx(-0.9));
  CHECK(step.state.v(0)[1] == 0.0);
  CHECK(step.report.active_count == 0);
  CHECK(step.report.control_magnitude == 0.0);
}

TEST_CASE("filtered S = 1 relaxes the mean exactly") {
  const CommunicationKernel k(0.5);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Ensemble e = random_ensemble(40, 2, seed);
    const double kappa = 0.5 * static_cast<double>(seed);
    const double dt = 0.05;
    const auto step = micro_step(e, spec_of(ControlMode::filtered, kappa), k, dt);
    const Vector m = mean_velocity(e);
    const Vector m1 = mean_velocity(step.state);
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(m1[c] == doctest::Approx(m[c] + dt / (kappa + dt) * (1.0 - m[c])).epsilon(1e-12));
    }
    CHECK(step.report.active_count == 40);
  }
}

TEST_CASE("implicit scalar case and S = 0") {
  const CommunicationKernel k(1.0);
  for (double kappa : {0.25, 1.0, 4.0}) {
    const double dt = 0.1;
    const Ensemble e = single(-2.0, 0.5);
    const Ensemble next = micro_step_implicit(e, spec_of(ControlMode::filtered, kappa), k, dt);
    const double r = dt / kappa;
    CHECK(next.v(0)[0] == doctest::Approx((-2.0 + r) / (1.0 + r)));
    CHECK(next.v(0)[1] == doctest::Approx((0.5 + r) / (1.0 + r)));
  }
  const Ensemble e = random_ensemble(25, 2, 8);
  const auto zero = spec_of(ControlMode::filtered, 1.0, Selector::none());
  const Ensemble imp = micro_step_implicit(e, zero, k, 0.1);
  const auto exp = micro_step(e, spec_of(ControlMode::none, 1.0), k, 0.1);
  CHECK(max_abs_diff(imp.velocities(), exp.state.velocities()) < 1e-15);
  CHECK_THROWS_AS(micro_step_implicit(e, spec_of(ControlMode::pointwise, 1.0), k, 0.1), ContractError);
}

TEST_CASE("implicit step solves the dense system") {
  const CommunicationKernel k(0.7);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t n = 12;
    const Ensemble e = random_ensemble(n, 2, seed + 10);
    const auto spec = spec_of(ControlMode::filtered, 0.3, Selector::ball(2.0));
    const double dt = 0.2;
    const double a = dt / static_cast<double>(n);
    const double b = 1.0 / spec.kappa;
    const auto s = selectivity(spec.selector, e);

    // (Id + a b S) v' = v - a L v + a b S e v_bar
    std::vector<double> mat(n * n, 0.0), rhs(n * 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double row_h = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double h = k.of_squared(squared_distance(e.x(i), e.x(j)));
        row_h += h;
        for (std::size_t c = 0; c < 2; ++c) rhs[i * 2 + c] += a * h * e.v(j)[c];
        mat[i * n + j] = a * b * s[i] * s[j] + (i == j ? 1.0 : 0.0);
      }
      double se = 0.0;
      for (std::size_t j = 0; j < n; ++j) se += s[i] * s[j];
      for (std::size_t c = 0; c < 2; ++c) {
        rhs[i * 2 + c] += e.v(i)[c] - a * row_h * e.v(i)[c] + a * b * se * spec.target.v_bar[c];
      }
    }
    const auto oracle = dense_solve(mat, rhs, n, 2);
    const Ensemble got = micro_step_implicit(e, spec, k, dt);
    CHECK(max_abs_diff(got.velocities(), oracle) < 1e-12);
  }
}

TEST_CASE("explicit and implicit steps agree to second order") {
  const CommunicationKernel k(0.5);
  const Ensemble e = random_ensemble(16, 2, 21);
  // S must vary across agents; with S = 1 the two steps coincide exactly.
  const auto spec = spec_of(ControlMode::filtered, 0.5, Selector::ball(2.0));
  std::vector<double> err;
  for (double dt : {0.04, 0.02, 0.01}) {
    const auto exp = micro_step(e, spec, k, dt);
    const auto imp = micro_step_implicit(e, spec, k, dt);
    err.push_back(max_abs_diff(exp.state.velocities(), imp.velocities()));
  }
  REQUIRE(err[2] > 0.0);
  CHECK(std::log2(err[0] / err[1]) >= 1.9);
  CHECK(std::log2(err[1] / err[2]) >= 1.9);
}

TEST_CASE("alignment conserves momentum and contracts the hull") {
  const CommunicationKernel k(0.5);
  const auto none = spec_of(ControlMode::none, 1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Ensemble e = random_ensemble(60, 2, seed);
    const Vector m0 = mean_velocity(e);
    for (int n = 0; n < 20; ++n) {
      const double d0 = velocity_diameter(e);
      const auto step = micro_step(e, none, k, 0.1);
      CHECK(velocity_diameter(step.state) <= d0 * (1.0 + 1e-12));
      // Each new velocity is a convex combination: it stays inside the
      // bounding box of the old ones.
      for (std::size_t c = 0; c < 2; ++c) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < e.size(); ++i) {
          lo = std::min(lo, e.v(i)[c]);
          hi = std::max(hi, e.v(i)[c]);
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
          CHECK(step.state.v(i)[c] >= lo - 1e-12);
          CHECK(step.state.v(i)[c] <= hi + 1e-12);
        }
      }
      e = step.state;
    }
    const Vector m1 = mean_velocity(e);
    CHECK(std::abs(m1[0] - m0[0]) < 1e-13);
    CHECK(std::abs(m1[1] - m0[1]) < 1e-13);
  }
}

TEST_CASE("pointwise full control shrinks the residual monotonically") {
  const CommunicationKernel k0(0.0);
  Ensemble e = random_ensemble(30, 2, 4);
  const auto spec = spec_of(ControlMode::pointwise, 0.5);
  double prev = misalignment(e, spec.target);
  for (int n = 0; n < 30; ++n) {
    const auto step = micro_step(e, spec, k0, 0.05);
    CHECK(step.report.misalignment == doctest::Approx(prev));
    const double now = misalignment(step.state, spec.target);
    CHECK(now < prev);
    prev = now;
    e = step.state;
  }
}

TEST_CASE("run_micro") {
  const CommunicationKernel k(0.5);
  const Ensemble e = random_ensemble(20, 2, 5);
  const auto spec = spec_of(ControlMode::filtered, 1.0, Selector::ball(2.0));

  const auto one = run_micro(e, spec, k, 0.1, 0.1);
  CHECK(one.steps == 1);
  CHECK(one.final_state == micro_step(e, spec, k, 0.1).state);

  std::vector<std::size_t> seen;
  Observer obs = [&](std::size_t n, double t, const Ensemble& s, const StepReport&) {
    seen.push_back(n);
    CHECK(t == doctest::Approx(0.1 * static_cast<double>(n)));
    CHECK(s.time() == t);
  };
  const auto run = run_micro(e, spec, k, 0.1, 1.0, {obs});
  CHECK(run.steps == 10);
  CHECK(run.reports.size() == 10);
  REQUIRE(seen.size() == 11);
  for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i);

  CHECK_THROWS_AS(run_micro(e, spec, k, 0.1, 0.05), ContractError);
  CHECK_THROWS_AS(run_micro(e, spec, k, 0.1, 0.25), ContractError);

  // Uncontrolled decay of the velocity diameter under a divergent kernel tail.
  const Ensemble wide = random_ensemble(40, 2, 6);
  const auto free = run_micro(wide, spec_of(ControlMode::none, 1.0), k, 0.1, 10.0);
  CHECK(velocity_diameter(free.final_state) < velocity_diameter(wide));
}

TEST_CASE("filtered mean follows the exponential relaxation") {
  const CommunicationKernel k(0.5);
  const Ensemble e = random_ensemble(30, 2, 7);
  const Vector m0 = mean_velocity(e);
  const double kappa = 1.0, horizon = 2.0;
  std::vector<double> err;
  for (double dt : {0.02, 0.01}) {
    const auto run = run_micro(e, spec_of(ControlMode::filtered, kappa), k, dt, horizon);
    const Vector m = mean_velocity(run.final_state);
    const double decay = std::exp(-horizon / kappa);
    double worst = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
      worst = std::max(worst, std::abs(m[c] - ((1 - decay) * 1.0 + decay * m0[c])));
    }
    err.push_back(worst);
  }
  CHECK(err[0] < 0.02);
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("blowup reports agent and step") {
  // A steep kernel and a far-away agent keep alignment from damping it.
  const CommunicationKernel k(10.0);
  Ensemble e = random_ensemble(5, 2, 1);
  e.x(3)[0] = 1e6;
  e.v(3)[0] = 5e11;
  const auto none = spec_of(ControlMode::none, 1.0);
  // Position of agent 3 crosses the blowup limit within a few steps.
  try {
    run_micro(e, none, k, 1.0, 10.0);
    FAIL("expected a blowup");
  } catch (const NumericalBlowup& err) {
    CHECK(err.agent() == 3);
    CHECK(err.step() == 2);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const CommunicationKernel k(0.5);
  const Ensemble e = random_ensemble(700, 2, 11);
  const auto spec = spec_of(ControlMode::filtered, 0.5, Selector::ball(2.0));
  const std::size_t saved = thread_limit();
  set_thread_limit(1);
  const auto a = run_micro(e, spec, k, 0.05, 0.25);
  set_thread_limit(4);
  const auto b = run_micro(e, spec, k, 0.05, 0.25);
  set_thread_limit(saved);
  CHECK(a.final_state == b.final_state);
}
