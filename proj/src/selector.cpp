#include "flocksel/selector.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "flocksel/csv.hpp"
#include "flocksel/errors.hpp"

namespace flocksel {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view s, std::string_view what) {
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ContractError("malformed " + std::string(what) + " '" +
                        std::string(s) + "'");
  }
  return value;
}

std::size_t parse_count(std::string_view s, std::string_view what) {
  std::size_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ContractError("malformed " + std::string(what) + " '" +
                        std::string(s) + "'");
  }
  return value;
}

}  // namespace

Selector::Selector(SelectorKind kind, double radius, std::size_t intervals,
                   std::size_t candidates)
    : kind_(kind),
      radius_(radius),
      intervals_(intervals),
      candidates_(candidates) {}

Selector Selector::all() { return {SelectorKind::all, 0.0, 0, 0}; }
Selector Selector::none() { return {SelectorKind::none, 0.0, 0, 0}; }

Selector Selector::ball(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ContractError("ball radius must be positive");
  }
  return {SelectorKind::ball, radius, 0, 0};
}

Selector Selector::variational(double rho, std::size_t intervals,
                               std::size_t candidates) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ContractError("variational radius must be positive");
  }
  if (intervals < 1) throw ContractError("variational L must be >= 1");
  if (candidates < 1) throw ContractError("variational M must be >= 1");
  return {SelectorKind::variational, rho, intervals, candidates};
}

Selector Selector::parse(std::string_view spec) {
  const auto parts = split(spec, ':');
  const auto head = parts.front();
  if (head == "all" && parts.size() == 1) return all();
  if (head == "none" && parts.size() == 1) return none();
  if (head == "ball" && parts.size() == 2) {
    return ball(parse_double(parts[1], "ball radius"));
  }
  if (head == "var" && parts.size() == 4) {
    return variational(parse_double(parts[1], "variational radius"),
                       parse_count(parts[2], "interval count"),
                       parse_count(parts[3], "candidate count"));
  }
  throw ContractError("selector must be all | none | ball:R | var:RHO:L:M, got '" +
                      std::string(spec) + "'");
}

std::string Selector::to_string() const {
  switch (kind_) {
    case SelectorKind::all:
      return "all";
    case SelectorKind::none:
      return "none";
    case SelectorKind::ball:
      return "ball:" + format_real(radius_);
    case SelectorKind::variational:
      return "var:" + format_real(radius_) + ':' + std::to_string(intervals_) +
             ':' + std::to_string(candidates_);
  }
  return {};
}

const Vector& Selector::center() const {
  if (!center_) throw ContractError("variational selector has no center yet");
  return *center_;
}

void Selector::set_center(Vector c) { center_ = std::move(c); }

double Selector::value(std::span<const double> x, std::span<const double>,
                       double) const {
  switch (kind_) {
    case SelectorKind::all:
      return 1.0;
    case SelectorKind::none:
      return 0.0;
    case SelectorKind::ball:
      return squared_norm(x) <= radius_ * radius_ ? 1.0 : 0.0;
    case SelectorKind::variational: {
      const Vector& c = center();
      if (c.size() != x.size()) {
        throw ContractError("selector center dimension mismatch");
      }
      return squared_distance(x, c) <= radius_ * radius_ ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

double selective_value(const Selector& s, std::span<const double> x,
                       std::span<const double> v, double t) {
  return s.value(x, v, t);
}

std::vector<double> selectivity(const Selector& s, const Ensemble& e) {
  std::vector<double> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    out[i] = s.value(e.x(i), e.v(i), e.time());
  }
  return out;
}

CenterUpdate update_variational_center(const Selector& s, const Ensemble& e,
                                       const TargetState& target,
                                       RngStream& rng) {
  if (s.kind() != SelectorKind::variational) {
    throw ContractError("center update needs a variational selector");
  }
  const std::size_t n = e.size();
  if (n == 0) throw ContractError("center update on an empty ensemble");
  if (target.v_bar.size() != e.dim()) {
    throw ContractError("target dimension does not match the ensemble");
  }

  CenterUpdate out{s, 0.0, s.candidates(), false};
  if (out.candidates_used > n) {
    out.candidates_used = n;
    out.clamped = true;
  }

  // Partial Fisher-Yates: the first m entries are the draw order.
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t k = 0; k < out.candidates_used; ++k) {
    const std::size_t j = k + rng.uniform_index(n - k);
    std::swap(pool[k], pool[j]);
  }

  std::vector<double> weight(n);
  for (std::size_t j = 0; j < n; ++j) {
    weight[j] = squared_distance(e.v(j), target.v_bar);
  }

  const double r2 = s.radius() * s.radius();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::size_t best = pool[0];
  double best_value = -1.0;
  for (std::size_t k = 0; k < out.candidates_used; ++k) {
    const auto c = e.x(pool[k]);
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (squared_distance(e.x(j), c) <= r2) mass += weight[j];
    }
    mass *= inv_n;
    if (mass > best_value) {
      best_value = mass;
      best = pool[k];
    }
  }
  const auto c = e.x(best);
  out.selector.set_center(Vector(c.begin(), c.end()));
  out.objective = best_value;
  return out;
}

std::vector<double> schedule_updates(const Selector& s, double horizon) {
  if (s.kind() != SelectorKind::variational) {
    throw ContractError("update schedule needs a variational selector");
  }
  std::vector<double> times(s.intervals());
  for (std::size_t l = 0; l < times.size(); ++l) {
    times[l] = static_cast<double>(l) * horizon /
               static_cast<double>(s.intervals());
  }
  return times;
}

std::vector<std::size_t> schedule_steps(const Selector& s, double horizon,
                                        double dt) {
  if (s.kind() != SelectorKind::variational) return {};
  std::vector<std::size_t> steps;
  for (double tau : schedule_updates(s, horizon)) {
    const auto step = static_cast<std::size_t>(std::ceil(tau / dt - 1e-9));
    if (steps.empty() || step > steps.back()) steps.push_back(step);
  }
  return steps;
}

}  // namespace flocksel
