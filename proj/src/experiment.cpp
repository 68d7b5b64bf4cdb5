#include "flocksel/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "flocksel/cost.hpp"
#include "flocksel/csv.hpp"
#include "flocksel/errors.hpp"

namespace flocksel {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_real(std::string_view s) {
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() ||
      !std::isfinite(value)) {
    throw ContractError("expected a real number, got '" + std::string(s) + "'");
  }
  return value;
}

std::uint64_t to_uint(std::string_view s) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ContractError("expected a nonnegative integer, got '" +
                        std::string(s) + "'");
  }
  return value;
}

Vector to_vector(std::string_view s) {
  Vector out;
  for (auto part : split(s, ',')) out.push_back(to_real(part));
  return out;
}

// gaussian:CX,CY:VAR
GaussianSpace to_space(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3 || parts[0] != "gaussian") {
    throw ContractError("initial_position must be gaussian:CX,CY:VARIANCE");
  }
  GaussianSpace g{to_vector(parts[1]), to_real(parts[2])};
  if (g.center.size() != 2) throw ContractError("center needs two components");
  return g;
}

// circle:R | point:V1,V2
std::variant<UniformCircleVelocity, PointVelocity> to_velocity(
    std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() == 2 && parts[0] == "circle") {
    return UniformCircleVelocity{to_real(parts[1])};
  }
  if (parts.size() == 2 && parts[0] == "point") {
    PointVelocity p{to_vector(parts[1])};
    if (p.v.size() != 2) throw ContractError("point velocity needs two components");
    return p;
  }
  throw ContractError("initial_velocity must be circle:R or point:V1,V2");
}

// XMIN:XMAX:YMIN:YMAX:NX:NY
GridSpec to_grid(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 6) {
    throw ContractError("density_grid must be XMIN:XMAX:YMIN:YMAX:NX:NY");
  }
  return {to_real(parts[0]),
          to_real(parts[1]),
          to_real(parts[2]),
          to_real(parts[3]),
          static_cast<std::size_t>(to_uint(parts[4])),
          static_cast<std::size_t>(to_uint(parts[5]))};
}

ControlMode to_mode(std::string_view s) {
  if (s == "none") return ControlMode::none;
  if (s == "filtered") return ControlMode::filtered;
  if (s == "pointwise") return ControlMode::pointwise;
  throw ContractError("control must be none, filtered or pointwise");
}

SolverKind to_solver(std::string_view s) {
  if (s == "micro") return SolverKind::micro;
  if (s == "kinetic") return SolverKind::kinetic;
  throw ContractError("solver must be micro or kinetic");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"solver", [](auto& c, auto v) { c.solver = to_solver(v); }},
      {"n", [](auto& c, auto v) { c.n = to_uint(v); }},
      {"n_samples", [](auto& c, auto v) { c.n = to_uint(v); }},
      {"scale", [](auto& c, auto v) { c.scale = to_uint(v); }},
      {"dt", [](auto& c, auto v) { c.dt = to_real(v); }},
      {"T", [](auto& c, auto v) { c.horizon = to_real(v); }},
      {"epsilon", [](auto& c, auto v) { c.epsilon = to_real(v); }},
      {"gamma", [](auto& c, auto v) { c.gamma = to_real(v); }},
      {"control", [](auto& c, auto v) { c.control = to_mode(v); }},
      {"kappa", [](auto& c, auto v) { c.kappa = to_real(v); }},
      {"selector", [](auto& c, auto v) { c.selector = Selector::parse(v); }},
      {"target", [](auto& c, auto v) { c.target = to_vector(v); }},
      {"initial_position",
       [](auto& c, auto v) { c.initial.spatial = to_space(v); }},
      {"initial_velocity",
       [](auto& c, auto v) { c.initial.velocity = to_velocity(v); }},
      {"seed", [](auto& c, auto v) { c.seed = to_uint(v); }},
      {"output", [](auto& c, auto v) { c.output = std::string(v); }},
      {"snapshot_stride", [](auto& c, auto v) { c.snapshot_stride = to_uint(v); }},
      {"snapshot_rows", [](auto& c, auto v) { c.snapshot_rows = to_uint(v); }},
      {"density_grid", [](auto& c, auto v) { c.grid = to_grid(v); }},
  };
  return table;
}

struct KeyedViolation {
  std::string key;
  std::string message;
};

std::vector<KeyedViolation> check(const ExperimentConfig& c) {
  std::vector<KeyedViolation> out;
  auto fail = [&](std::string key, std::string msg) {
    out.push_back({std::move(key), std::move(msg)});
  };
  if (c.n == 0) fail("n", "agent/sample count must be >= 1");
  if (c.scale == 0) fail("scale", "scale divisor must be >= 1");
  if (!(c.dt > 0.0)) fail("dt", "dt must be positive");
  if (!(c.horizon > 0.0)) fail("T", "T must be positive");
  if (c.dt > 0.0 && c.horizon > 0.0) {
    try {
      step_count(c.horizon, c.dt);
    } catch (const ContractError& e) {
      fail("T", e.what());
    }
  }
  if (c.epsilon) {
    if (!(*c.epsilon > 0.0)) {
      fail("epsilon", "epsilon must be positive");
    } else if (c.dt > *c.epsilon) {
      fail("epsilon", "dt <= epsilon is required for positivity (dt = " +
                          format_real(c.dt) + ", epsilon = " +
                          format_real(*c.epsilon) + ")");
    }
  }
  if (!(c.gamma >= 0.0)) fail("gamma", "gamma must be >= 0");
  if (!(c.kappa > 0.0)) fail("kappa", "kappa must be positive");
  if (c.target.size() != 2) fail("target", "target needs two components");
  if (c.snapshot_rows == 0) fail("snapshot_rows", "snapshot_rows must be >= 1");
  if (!(c.grid.x_max > c.grid.x_min) || !(c.grid.y_max > c.grid.y_min) ||
      c.grid.nx == 0 || c.grid.ny == 0) {
    fail("density_grid", "density grid is degenerate");
  }
  if (c.initial.spatial.center.size() != 2) {
    fail("initial_position", "center needs two components");
  }
  if (!(c.initial.spatial.variance > 0.0)) {
    fail("initial_position", "variance must be positive");
  }
  if (const auto* circle =
          std::get_if<UniformCircleVelocity>(&c.initial.velocity)) {
    if (!(circle->radius >= 0.0)) {
      fail("initial_velocity", "circle radius must be >= 0");
    }
  }
  return out;
}

ExperimentConfig reference_base() {
  ExperimentConfig c;
  c.solver = SolverKind::kinetic;
  c.n = 500000;
  c.dt = 0.01;
  c.horizon = 4.0;
  c.gamma = 10.0;
  c.target = {1.0, 1.0};
  c.initial.spatial = GaussianSpace{{0.0, 0.0}, 1.0};
  c.initial.velocity = UniformCircleVelocity{5.0};
  return c;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fill) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  fill(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::size_t> snapshot_ids(std::size_t n, std::size_t rows,
                                      RngStream rng) {
  std::vector<std::size_t> ids;
  if (n <= rows) {
    ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    return ids;
  }
  std::vector<std::size_t> pool = rng.permutation(n);
  ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(rows));
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::size_t ExperimentConfig::effective_n() const {
  return std::max<std::size_t>(1, n / std::max<std::size_t>(1, scale));
}

ControlSpec ExperimentConfig::control_spec() const {
  return ControlSpec{control, kappa, TargetState{target}, selector};
}

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) {
          msg += "\n  ";
          if (v.line != 0) msg += "line " + std::to_string(v.line) + ": ";
          msg += v.message;
        }
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::vector<std::string> preset_names() {
  return {"uncontrolled",          "test1a",
          "test1b",                "variational_filtered",
          "variational_pointwise", "variational_filtered_k2",
          "variational_pointwise_k2"};
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c = reference_base();
  const Selector var = Selector::variational(2.5, 40, 512);
  if (name == "uncontrolled") {
    c.control = ControlMode::none;
  } else if (name == "test1a") {
    c.control = ControlMode::filtered;
    c.selector = Selector::ball(5.0);
    c.kappa = 0.25;
  } else if (name == "test1b") {
    c.control = ControlMode::pointwise;
    c.selector = Selector::ball(5.0);
    c.kappa = 0.25;
  } else if (name == "variational_filtered" ||
             name == "variational_filtered_k2") {
    c.control = ControlMode::filtered;
    c.selector = var;
    c.kappa = name.ends_with("_k2") ? 2.0 : 0.25;
  } else if (name == "variational_pointwise" ||
             name == "variational_pointwise_k2") {
    c.control = ControlMode::pointwise;
    c.selector = var;
    c.kappa = name.ends_with("_k2") ? 2.0 : 0.25;
  } else {
    throw ConfigError({{0, "unknown preset '" + std::string(name) + "'"}});
  }
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  struct Entry {
    std::size_t line;
    std::string key;
    std::string value;
  };
  std::vector<Entry> entries;
  std::vector<ConfigViolation> violations;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      violations.push_back({line_no, "expected 'key = value'"});
      continue;
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      violations.push_back({line_no, "missing key"});
      continue;
    }
    if (key != "preset" && !setters().contains(key)) {
      violations.push_back({line_no, "unknown key '" + std::string(key) + "'"});
      continue;
    }
    entries.push_back({line_no, std::string(key), std::string(value)});
  }

  ExperimentConfig cfg;
  for (const auto& e : entries) {
    if (e.key != "preset") continue;
    try {
      cfg = preset(e.value);
    } catch (const ConfigError&) {
      violations.push_back({e.line, "unknown preset '" + e.value + "'"});
    }
  }

  std::map<std::string, std::size_t> key_line;
  for (const auto& e : entries) {
    if (e.key == "preset") continue;
    key_line[e.key] = e.line;
    try {
      setters().find(e.key)->second(cfg, e.value);
    } catch (const std::exception& err) {
      violations.push_back({e.line, e.key + ": " + err.what()});
    }
  }

  for (auto& v : check(cfg)) {
    std::size_t line = 0;
    if (auto it = key_line.find(v.key); it != key_line.end()) line = it->second;
    if (v.key == "epsilon" && line == 0) {
      if (auto it = key_line.find("dt"); it != key_line.end()) line = it->second;
    }
    violations.push_back({line, v.message});
  }
  if (!violations.empty()) {
    std::stable_sort(violations.begin(), violations.end(),
                     [](const auto& a, const auto& b) { return a.line < b.line; });
    throw ConfigError(std::move(violations));
  }
  return cfg;
}

std::vector<ConfigViolation> validate(const ExperimentConfig& cfg) {
  std::vector<ConfigViolation> out;
  for (auto& v : check(cfg)) out.push_back({0, v.key + ": " + v.message});
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (auto violations = validate(cfg); !violations.empty()) {
    throw ConfigError(std::move(violations));
  }
  const auto started = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(cfg.output);
  } catch (const std::filesystem::filesystem_error& err) {
    throw IoError(err.what());
  }

  const RngStream rng(cfg.seed);
  const std::size_t n = cfg.effective_n();
  RngStream init_stream = rng.derive(0);
  const Ensemble initial = sample_initial(cfg.initial, n, init_stream);
  const std::size_t steps = step_count(cfg.horizon, cfg.dt);
  const std::vector<std::size_t> ids =
      snapshot_ids(n, cfg.snapshot_rows, rng.derive(3));

  ExperimentResult result;
  result.steps = steps;
  CostAccumulator cost(cfg.kappa, cfg.dt, TargetState{cfg.target});
  auto snapshots = [&](std::size_t step, double, const Ensemble& state,
                       const StepReport&) {
    if (step == 0) result.velocity_diameter_initial = velocity_diameter(state);
    const bool periodic = cfg.snapshot_stride != 0 && step % cfg.snapshot_stride == 0;
    if (step != 0 && step != steps && !periodic) return;
    const std::string tag = std::to_string(step);
    write_file(cfg.output / ("snap_" + tag + ".csv"),
               [&](std::ostream& out) { write_snapshot_csv(out, state, ids); });
    const DensityGrid grid = bin_density(state, cfg.grid);
    write_file(cfg.output / ("density_" + tag + ".csv"),
               [&](std::ostream& out) { write_density_csv(out, grid); });
  };
  const std::vector<Observer> observers{cost.observer(), snapshots};

  RunSummary run;
  const ControlSpec spec = cfg.control_spec();
  const CommunicationKernel kernel(cfg.gamma);
  const RngStream run_stream = rng.derive(1);
  if (cfg.solver == SolverKind::micro) {
    run = run_micro(initial, spec, kernel, cfg.dt, cfg.horizon, observers,
                    run_stream);
  } else {
    KineticConfig kcfg(n, cfg.effective_epsilon(), cfg.dt, spec, kernel);
    run = run_kinetic(initial, std::move(kcfg), cfg.horizon, observers,
                      run_stream);
  }

  const CostTrace& trace = cost.trace();
  const SweepMetrics metrics =
      sweep_metrics(trace, cfg.kappa, cfg.dt, cfg.horizon);
  result.alignment = metrics.alignment;
  result.control_cost = metrics.control_cost;
  result.total_cost = trace.total;
  result.velocity_diameter_final = velocity_diameter(run.final_state);

  write_file(cfg.output / "cost.csv",
             [&](std::ostream& out) { write_cost_csv(out, trace); });
  write_file(cfg.output / "summary.csv", [&](std::ostream& out) {
    out << "A,C_T,C,velocity_diameter_initial,velocity_diameter_final,steps\n"
        << format_real(result.alignment) << ',' << format_real(result.total_cost)
        << ',' << format_real(result.control_cost) << ','
        << format_real(result.velocity_diameter_initial) << ','
        << format_real(result.velocity_diameter_final) << ',' << result.steps
        << '\n';
  });
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  write_file(cfg.output / "timing.csv", [&](std::ostream& out) {
    out << "runtime_s\n" << format_real(result.runtime_seconds) << '\n';
  });
  return result;
}

std::string summary_line(const ExperimentResult& r) {
  std::ostringstream os;
  os << "A=" << format_real(r.alignment) << " C_T=" << format_real(r.total_cost)
     << " C=" << format_real(r.control_cost)
     << " vdiam0=" << format_real(r.velocity_diameter_initial)
     << " vdiamT=" << format_real(r.velocity_diameter_final)
     << " steps=" << r.steps << " runtime_s=" << format_real(r.runtime_seconds);
  return os.str();
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base,
                                const std::vector<double>& radii,
                                const std::vector<double>& kappas,
                                const std::vector<std::uint64_t>& seeds) {
  if (radii.empty() || kappas.empty() || seeds.empty()) {
    throw ContractError("sweep parameter lists must be nonempty");
  }
  auto rs = radii;
  auto ks = kappas;
  auto ss = seeds;
  std::sort(rs.begin(), rs.end());
  std::sort(ks.begin(), ks.end());
  std::sort(ss.begin(), ss.end());

  std::vector<SweepRow> rows;
  for (double r : rs) {
    for (double k : ks) {
      for (std::uint64_t s : ss) {
        SweepRow row{r, k, s, {}, "ok"};
        ExperimentConfig cfg = base;
        cfg.kappa = k;
        cfg.seed = s;
        cfg.output = base.output / ("R_" + format_real(r) + "_kappa_" +
                                    format_real(k) + "_seed_" + std::to_string(s));
        try {
          cfg.selector = Selector::ball(r);
          row.result = run_experiment(cfg);
        } catch (const std::exception& err) {
          const double nan = std::nan("");
          row.result = {nan, nan, nan, nan, nan, 0, 0.0};
          row.status = err.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  try {
    std::filesystem::create_directories(base.output);
  } catch (const std::filesystem::filesystem_error& err) {
    throw IoError(err.what());
  }
  write_file(base.output / "sweep.csv",
             [&](std::ostream& out) { write_sweep_csv(out, rows); });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "R,kappa,seed,A,C,C_T,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << format_real(r.radius) << ',' << format_real(r.kappa) << ','
        << r.seed << ',' << format_real(r.result.alignment) << ','
        << format_real(r.result.control_cost) << ','
        << format_real(r.result.total_cost) << ',' << status << '\n';
  }
}

}  // namespace flocksel
