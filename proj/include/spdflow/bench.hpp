#pragma once

// Experiment harness behind the `spdflow` command-line tool: configuration,
// integrator comparisons against a fine-step reference, step-size bounds at
// the initial point, and convergence-order studies. Results are returned as
// values and optionally written as CSV.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdflow/integrators.hpp"
#include "spdflow/manifold.hpp"
#include "spdflow/models.hpp"

namespace spdflow::bench {

struct ExperimentConfig {
  std::string preset;             // "case1", "case2" or empty
  std::string model_id = "gbm";   // linear | ou | gbm | riccati | oscillating
  Mat a, b, c, q, r;              // model coefficients, as the model needs them
  Vec m0;                         // GBM initial mean
  Mat p0;
  std::vector<StepperKind> integrators{StepperKind::Rk4, StepperKind::RiemannianRk4,
                                       StepperKind::Rkmk4};
  ActionKind action = ActionKind::Congruence;
  double t0 = 0.0;
  double t1 = 1.0;
  int points = 11;
  int refine = 512;
  int dexpinv_order = 4;
  std::filesystem::path out_dir = "spdflow_out";
  std::uint64_t seed = 0;
  bool swap_pairing = false;
  bool parallel = false;

  double step() const noexcept { return (t1 - t0) / (points - 1); }
};

/// Built-in GBM case studies, "case1" and "case2".
ExperimentConfig preset_config(std::string_view name, bool swap_pairing = false);

/// Parses a JSON document. A "preset" key seeds the defaults; any other key
/// present overrides them. Throws Error(Config) on malformed input.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies SPDFLOW_SEED when set.
void apply_env_overrides(ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);
Model build_model(const ExperimentConfig& cfg);

// ---- run ------------------------------------------------------------------

struct ErrorRow {
  double t = 0.0;
  std::string integrator;
  double frob_dist = 0.0;
  std::optional<double> affine_dist;  // present iff spd
  bool spd = false;
};

struct IntegratorRun {
  std::string name;
  Trajectory trajectory;
  std::vector<ErrorRow> rows;
  std::optional<std::string> failure;

  double max_frob() const;
  double final_frob() const;
  std::optional<double> final_affine() const;
};

struct RunResult {
  Trajectory reference;
  std::vector<IntegratorRun> runs;

  const IntegratorRun& find(std::string_view name) const;
};

RunResult run_experiment(const ExperimentConfig& cfg);

/// Writes reference.csv, <integrator>.csv for each run, and errors.csv.
void write_run_csv(const RunResult& result, const std::filesystem::path& out_dir);

std::string trajectory_csv(const Trajectory& traj);
std::string errors_csv(const RunResult& result);

// ---- bounds ---------------------------------------------------------------

enum class BoundsField { Euler, Rk4 };

struct BoundsReport {
  BoundsField field = BoundsField::Euler;
  double h = 0.0;  // step used for the RK4 update direction
  Mat direction;   // T
  StepBounds bounds;
};

/// Bounds at the initial point. The Euler field is the model right-hand
/// side; the RK4 field is the effective direction (RK4(P0, h) - P0) / h of
/// one full step of the configured size.
BoundsReport compute_bounds(const ExperimentConfig& cfg, BoundsField field);

std::string format_bounds(const BoundsReport& report);

// ---- convergence ----------------------------------------------------------

struct ConvergenceConfig {
  std::string model_id = "oscillating";  // linear | oscillating | ou | riccati
  std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  std::vector<StepperKind> integrators{StepperKind::Euler, StepperKind::Rk4,
                                       StepperKind::LieEuler, StepperKind::Rkmk4};
  double t0 = 0.0;
  double t1 = 2.0;
  int reference_divisor = 64;
  std::uint64_t seed = 0;
  Eigen::Index dim = 3;
};

struct ConvergenceSeries {
  std::string integrator;
  std::vector<double> hs;
  std::vector<double> errors;
  bool exact = false;  // every error <= kExactTol
  double slope = 0.0;  // least-squares log-log slope, NaN when exact
};

inline constexpr double kExactTol = 1e-10;

struct ConvergenceReport {
  std::vector<ConvergenceSeries> series;
  const ConvergenceSeries& find(std::string_view name) const;
};

/// Random test problem for the convergence study, deterministic in seed.
struct ConvergenceProblem {
  Model model;
  Mat p0;
};
ConvergenceProblem make_convergence_problem(const ConvergenceConfig& cfg);

ConvergenceReport run_convergence(const ConvergenceConfig& cfg);
std::string convergence_csv(const ConvergenceReport& report);
std::string format_convergence(const ConvergenceReport& report);

/// Least-squares slope of log(errors) against log(hs).
double fit_slope(const std::vector<double>& hs, const std::vector<double>& errors);

/// "%.17g"
std::string format_real(double x);

}  // namespace spdflow::bench
