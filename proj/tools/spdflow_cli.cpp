// spdflow: run integrator comparisons, report step-size bounds, and measure
// convergence orders from the command line.
//
// Exit codes: 0 success, 2 configuration / IO error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spdflow/bench.hpp"

namespace {

using namespace spdflow;
using namespace spdflow::bench;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Io:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimMismatch:
    case ErrorKind::NotSymmetric:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

void report_error(ErrorKind kind, const std::string& message) {
  std::cerr << "error: kind=" << to_string(kind) << " message=" << message << '\n';
}

ExperimentConfig resolve_config(const std::string& config_path, const std::string& preset,
                                bool swap_pairing) {
  if (!config_path.empty() && !preset.empty()) {
    throw Error(ErrorKind::Config, "--config and --preset are mutually exclusive");
  }
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = load_config(config_path);
  } else if (!preset.empty()) {
    cfg = preset_config(preset, swap_pairing);
  } else {
    throw Error(ErrorKind::Config, "one of --config or --preset is required");
  }
  apply_env_overrides(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving integrators for ODEs on SPD matrices"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::vector<double> m0;
  std::optional<int> refine;
  bool parallel = false;
  bool swap_pairing = false;

  auto* run = app.add_subcommand("run", "Compare integrators against a fine-step reference");
  run->add_option("--config", config_path, "JSON experiment config");
  run->add_option("--preset", preset, "Built-in experiment")->check(CLI::IsMember({"case1", "case2"}));
  run->add_option("--out", out_dir, "Output directory for CSV files");
  run->add_option("--m0", m0, "Initial mean, comma separated")->delimiter(',');
  run->add_option("--refine", refine, "Reference sub-steps per grid interval");
  run->add_flag("--parallel", parallel, "Integrate trajectories on separate threads");
  run->add_flag("--swap-pairing", swap_pairing, "Pair the case-study spectrum in reverse order");

  std::string field = "euler";
  auto* bounds = app.add_subcommand("bounds", "Step-size bounds at the initial point");
  bounds->add_option("--config", config_path, "JSON experiment config");
  bounds->add_option("--preset", preset, "Built-in experiment")->check(CLI::IsMember({"case1", "case2"}));
  bounds->add_option("--field", field, "Update direction")->check(CLI::IsMember({"euler", "rk4", "both"}));
  bounds->add_option("--m0", m0, "Initial mean, comma separated")->delimiter(',');
  bounds->add_flag("--swap-pairing", swap_pairing, "Pair the case-study spectrum in reverse order");

  ConvergenceConfig conv;
  std::string conv_out;
  std::vector<std::string> conv_integrators;
  auto* convergence = app.add_subcommand("convergence", "Fitted convergence orders");
  convergence->add_option("--model", conv.model_id, "linear | oscillating | ou | riccati | gbm")
      ->check(CLI::IsMember({"linear", "oscillating", "ou", "riccati", "gbm"}));
  convergence->add_option("--hs", conv.hs, "Step sizes, comma separated")->delimiter(',');
  convergence->add_option("--integrators", conv_integrators, "Integrator ids")->delimiter(',');
  convergence->add_option("--seed", conv.seed, "Random problem seed");
  convergence->add_option("--t1", conv.t1, "Final time");
  convergence->add_option("--out", conv_out, "Write convergence.csv into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = resolve_config(config_path, preset, swap_pairing);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (!m0.empty()) cfg.m0 = Eigen::Map<const Vec>(m0.data(), static_cast<Eigen::Index>(m0.size()));
      if (refine) cfg.refine = *refine;
      if (parallel) cfg.parallel = true;
      const RunResult result = run_experiment(cfg);
      write_run_csv(result, cfg.out_dir);
      for (const auto& r : result.runs) {
        std::cout << r.name << " final_frob=" << format_real(r.final_frob()) << " final_affine="
                  << (r.final_affine() ? format_real(*r.final_affine()) : std::string("NA"))
                  << " max_frob=" << format_real(r.max_frob())
                  << " non_spd=" << r.trajectory.spd_failures() << '\n';
        if (r.failure) {
          std::cout << r.name << " failure: " << *r.failure << '\n';
        }
      }
      std::cout << "wrote " << cfg.out_dir.string() << '\n';
      return 0;
    }

    if (*bounds) {
      ExperimentConfig cfg = resolve_config(config_path, preset, swap_pairing);
      if (!m0.empty()) cfg.m0 = Eigen::Map<const Vec>(m0.data(), static_cast<Eigen::Index>(m0.size()));
      if (field == "euler" || field == "both") {
        std::cout << format_bounds(compute_bounds(cfg, BoundsField::Euler)) << '\n';
      }
      if (field == "rk4" || field == "both") {
        std::cout << format_bounds(compute_bounds(cfg, BoundsField::Rk4)) << '\n';
      }
      return 0;
    }

    if (*convergence) {
      if (const char* seed = std::getenv("SPDFLOW_SEED"); seed != nullptr && *seed != '\0') {
        conv.seed = std::stoull(seed);
      }
      if (!conv_integrators.empty()) {
        conv.integrators.clear();
        for (const auto& id : conv_integrators) conv.integrators.push_back(stepper_from_string(id));
      }
      const ConvergenceReport report = run_convergence(conv);
      std::cout << format_convergence(report);
      if (!conv_out.empty()) {
        std::filesystem::create_directories(conv_out);
        std::ofstream out(std::filesystem::path(conv_out) / "convergence.csv", std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write convergence.csv in " + conv_out);
        out << convergence_csv(report);
      }
      return 0;
    }
  } catch (const Error& e) {
    report_error(e.kind(), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error(ErrorKind::InvalidArgument, e.what());
    return kExitConfig;
  }
  return 0;
}
