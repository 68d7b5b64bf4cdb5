#ifndef FLOCKSEL_EXPERIMENT_HPP
#define FLOCKSEL_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flocksel/diagnostics.hpp"
#include "flocksel/kinetic.hpp"
#include "flocksel/micro.hpp"
#include "flocksel/selector.hpp"

namespace flocksel {

enum class SolverKind { micro, kinetic };

struct ExperimentConfig {
  SolverKind solver = SolverKind::kinetic;
  /// Agents (micro) or samples (kinetic), before dividing by `scale`.
  std::size_t n = 50000;
  std::size_t scale = 1;
  double dt = 0.01;
  double horizon = 4.0;
  /// Interaction scaling; unset means epsilon = dt.
  std::optional<double> epsilon;
  double gamma = 10.0;
  ControlMode control = ControlMode::none;
  double kappa = 1.0;
  Selector selector = Selector::all();
  Vector target{1.0, 1.0};
  InitialCondition initial;
  std::uint64_t seed = 1;
  std::filesystem::path output = "out";
  /// Snapshot every `snapshot_stride` steps; 0 keeps only initial and final.
  std::size_t snapshot_stride = 0;
  std::size_t snapshot_rows = 10000;
  GridSpec grid;

  std::size_t effective_n() const;
  double effective_epsilon() const { return epsilon.value_or(dt); }
  ControlSpec control_spec() const;
};

struct ConfigViolation {
  /// 1-based line of the offending entry; 0 for whole-document constraints.
  std::size_t line = 0;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<ConfigViolation> violations_;
};

/// Named experiment defaults. Throws ConfigError for an unknown name.
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Flat `key = value` document, `#` starts a comment. A `preset` entry is
/// applied first wherever it appears; every other key overrides it. All
/// violations are collected before throwing ConfigError.
ExperimentConfig parse_config(std::string_view text);

/// Re-checks cross-field constraints; returns every violation found.
std::vector<ConfigViolation> validate(const ExperimentConfig& cfg);

struct ExperimentResult {
  double alignment = 0.0;
  double total_cost = 0.0;
  double control_cost = 0.0;
  double velocity_diameter_initial = 0.0;
  double velocity_diameter_final = 0.0;
  std::size_t steps = 0;
  double runtime_seconds = 0.0;
};

/// Runs one experiment and writes cost.csv, summary.csv, timing.csv and the
/// snap_<step>.csv / density_<step>.csv series into cfg.output.
/// Throws IoError, NumericalBlowup or ConfigError.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// One-line human summary of a result.
std::string summary_line(const ExperimentResult& r);

struct SweepRow {
  double radius = 0.0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  ExperimentResult result;
  /// "ok" or the failure message.
  std::string status = "ok";
};

/// Every (R, kappa, seed) combination of `base` with selector ball:R, in
/// lexicographic order. Each run writes into its own subdirectory; the table
/// goes to base.output / "sweep.csv". Failed runs stay in the table.
std::vector<SweepRow> run_sweep(const ExperimentConfig& base,
                                const std::vector<double>& radii,
                                const std::vector<double>& kappas,
                                const std::vector<std::uint64_t>& seeds);

/// Header `R,kappa,seed,A,C,C_T,status`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace flocksel

#endif  // FLOCKSEL_EXPERIMENT_HPP
