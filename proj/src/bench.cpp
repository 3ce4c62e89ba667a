#include "spdflow/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace spdflow::bench {

using nlohmann::json;

namespace {

Mat parse_matrix(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorKind::Config, std::string(key) + " must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) {
    throw Error(ErrorKind::Config, std::string(key) + " must be a non-empty array of rows");
  }
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorKind::Config, std::string(key) + " has ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw Error(ErrorKind::Config, std::string(key) + " entries must be numbers");
      out(i, k) = v.get<double>();
    }
  }
  return out;
}

Vec parse_vector(const json& j, const char* key) {
  if (!j.is_array()) throw Error(ErrorKind::Config, std::string(key) + " must be an array");
  Vec out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::Config, std::string(key) + " entries must be numbers");
    out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return out;
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad value for '") + key + "': " + e.what());
  }
}

ActionKind action_from_string(const std::string& id) {
  if (id == "congruence") return ActionKind::Congruence;
  if (id == "symplectic") return ActionKind::Symplectic;
  throw Error(ErrorKind::Config, "unknown action '" + id + "'");
}

bool known_model(const std::string& id) {
  return id == "linear" || id == "ou" || id == "gbm" || id == "riccati" || id == "oscillating";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

Mat random_normal(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = scale * normal(rng);
  }
  return m;
}

int steps_for(double span, double h) {
  const double n = span / h;
  const double rounded = std::round(n);
  if (!(rounded >= 1.0) || std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
    std::ostringstream os;
    os << "step " << h << " does not divide the interval of length " << span;
    throw Error(ErrorKind::Config, os.str());
  }
  return static_cast<int>(rounded);
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---- configuration ----------------------------------------------------------

ExperimentConfig preset_config(std::string_view name, bool swap_pairing) {
  CaseStudy which;
  if (name == "case1") {
    which = CaseStudy::One;
  } else if (name == "case2") {
    which = CaseStudy::Two;
  } else {
    throw Error(ErrorKind::Config, "unknown preset '" + std::string(name) + "'");
  }
  const CaseStudyParams params = make_case_study(which, swap_pairing);
  ExperimentConfig cfg;
  cfg.preset = std::string(name);
  cfg.model_id = "gbm";
  cfg.a = params.a;
  cfg.b = params.b;
  cfg.m0 = params.m0;
  cfg.p0 = params.p0;
  cfg.t0 = params.t0;
  cfg.t1 = params.t1;
  cfg.points = params.points;
  cfg.swap_pairing = swap_pairing;
  cfg.out_dir = std::filesystem::path("spdflow_out") / cfg.preset;
  return cfg;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");

  static const std::vector<std::string> known_keys{
      "preset", "model", "a",  "b",      "c",      "q",    "r",    "m0",           "p0",
      "integrators", "action", "t0", "t1", "points", "refine", "out", "seed", "swap_pairing",
      "parallel", "dexpinv_order"};
  for (const auto& item : j.items()) {
    if (std::find(known_keys.begin(), known_keys.end(), item.key()) == known_keys.end()) {
      throw Error(ErrorKind::Config, "unknown config key '" + item.key() + "'");
    }
  }

  const bool swap = j.contains("swap_pairing") && get_as<bool>(j, "swap_pairing");
  ExperimentConfig cfg;
  if (j.contains("preset")) {
    cfg = preset_config(get_as<std::string>(j, "preset"), swap);
  }
  cfg.swap_pairing = swap;
  if (j.contains("model")) cfg.model_id = get_as<std::string>(j, "model");
  if (j.contains("a")) cfg.a = parse_matrix(j["a"], "a");
  if (j.contains("b")) cfg.b = parse_matrix(j["b"], "b");
  if (j.contains("c")) cfg.c = parse_matrix(j["c"], "c");
  if (j.contains("q")) cfg.q = parse_matrix(j["q"], "q");
  if (j.contains("r")) cfg.r = parse_matrix(j["r"], "r");
  if (j.contains("p0")) cfg.p0 = parse_matrix(j["p0"], "p0");
  if (j.contains("m0")) cfg.m0 = parse_vector(j["m0"], "m0");
  if (j.contains("integrators")) {
    cfg.integrators.clear();
    for (const auto& id : get_as<std::vector<std::string>>(j, "integrators")) {
      cfg.integrators.push_back(stepper_from_string(id));
    }
  }
  if (j.contains("action")) cfg.action = action_from_string(get_as<std::string>(j, "action"));
  if (j.contains("t0")) cfg.t0 = get_as<double>(j, "t0");
  if (j.contains("t1")) cfg.t1 = get_as<double>(j, "t1");
  if (j.contains("points")) cfg.points = get_as<int>(j, "points");
  if (j.contains("refine")) cfg.refine = get_as<int>(j, "refine");
  if (j.contains("out")) cfg.out_dir = get_as<std::string>(j, "out");
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("parallel")) cfg.parallel = get_as<bool>(j, "parallel");
  if (j.contains("dexpinv_order")) cfg.dexpinv_order = get_as<int>(j, "dexpinv_order");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_env_overrides(ExperimentConfig& cfg) {
  const char* seed = std::getenv("SPDFLOW_SEED");
  if (seed == nullptr || *seed == '\0') return;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(seed, &end, 10);
  if (end == seed || *end != '\0') {
    throw Error(ErrorKind::Config, std::string("SPDFLOW_SEED is not an integer: ") + seed);
  }
  cfg.seed = value;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.points < 2) throw Error(ErrorKind::Config, "points must be at least 2");
  if (!(cfg.t1 > cfg.t0) || !std::isfinite(cfg.t0) || !std::isfinite(cfg.t1)) {
    throw Error(ErrorKind::Config, "t1 must be finite and greater than t0");
  }
  if (cfg.refine < 2) throw Error(ErrorKind::Config, "refine must be at least 2");
  if (!known_model(cfg.model_id)) throw Error(ErrorKind::Config, "unknown model '" + cfg.model_id + "'");
  if (cfg.integrators.empty()) throw Error(ErrorKind::Config, "no integrators selected");
  if (cfg.dexpinv_order != 1 && cfg.dexpinv_order != 2 && cfg.dexpinv_order != 4) {
    throw Error(ErrorKind::Config, "dexpinv_order must be 1, 2 or 4");
  }
  if (cfg.p0.size() == 0) throw Error(ErrorKind::Config, "p0 is required");
  if (cfg.a.size() == 0) throw Error(ErrorKind::Config, "a is required");
}

Model build_model(const ExperimentConfig& cfg) {
  const Eigen::Index n = cfg.a.rows();
  auto need = [](const Mat& m, const char* key) {
    if (m.size() == 0) throw Error(ErrorKind::Config, std::string(key) + " is required for this model");
  };
  if (cfg.model_id == "linear") return linear_model(cfg.a);
  if (cfg.model_id == "ou") {
    need(cfg.b, "b");
    return ou_model(cfg.a, cfg.b);
  }
  if (cfg.model_id == "gbm") {
    need(cfg.b, "b");
    return gbm_model(cfg.a, cfg.b, cfg.m0.size() == 0 ? Vec(Vec::Zero(n)) : cfg.m0);
  }
  if (cfg.model_id == "riccati") {
    need(cfg.b, "b");
    need(cfg.q, "q");
    need(cfg.r, "r");
    return riccati_model(cfg.a, cfg.b, cfg.q, cfg.r);
  }
  if (cfg.model_id == "oscillating") {
    need(cfg.c, "c");
    return oscillating_model(cfg.a, cfg.c);
  }
  throw Error(ErrorKind::Config, "unknown model '" + cfg.model_id + "'");
}

// ---- run --------------------------------------------------------------------

double IntegratorRun::max_frob() const {
  double out = 0.0;
  for (const auto& row : rows) out = std::max(out, row.frob_dist);
  return out;
}

double IntegratorRun::final_frob() const {
  return rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().frob_dist;
}

std::optional<double> IntegratorRun::final_affine() const {
  if (rows.empty()) return std::nullopt;
  return rows.back().affine_dist;
}

const IntegratorRun& RunResult::find(std::string_view name) const {
  for (const auto& run : runs) {
    if (run.name == name) return run;
  }
  throw Error(ErrorKind::InvalidArgument, "no run named '" + std::string(name) + "'");
}

namespace {

IntegratorRun run_one(const ExperimentConfig& cfg, StepperKind kind, const Model& model,
                      const std::vector<double>& grid, const Trajectory& reference) {
  IntegratorRun run;
  run.name = std::string(to_string(kind));
  const auto stepper = make_stepper(kind, cfg.action, cfg.dexpinv_order);
  PartialTrajectory partial = integrate_partial(*stepper, model, cfg.p0, grid);
  if (partial.failure) run.failure = partial.failure->what();
  run.trajectory = std::move(partial.trajectory);

  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    ErrorRow row;
    row.t = run.trajectory.times[i];
    row.integrator = run.name;
    const Mat& p = run.trajectory.points[i];
    const Mat& ref = reference.points[i];
    row.frob_dist = (p - ref).norm();
    row.spd = run.trajectory.spd[i];
    if (row.spd) {
      try {
        row.affine_dist = affine_distance(ref, p);
      } catch (const Error&) {
        // Too close to the boundary for the spectral kernels to resolve.
        row.spd = false;
      }
    }
    run.rows.push_back(std::move(row));
  }
  return run;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const Model model = build_model(cfg);
  const std::vector<double> grid = linspace(cfg.t0, cfg.t1, cfg.points);

  RunResult result;
  result.reference = reference_trajectory(model, cfg.p0, grid, cfg.refine);
  result.runs.resize(cfg.integrators.size());

  if (cfg.parallel && cfg.integrators.size() > 1) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(cfg.integrators.size());
    for (std::size_t i = 0; i < cfg.integrators.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          result.runs[i] = run_one(cfg, cfg.integrators[i], model, grid, result.reference);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t i = 0; i < cfg.integrators.size(); ++i) {
      result.runs[i] = run_one(cfg, cfg.integrators[i], model, grid, result.reference);
    }
  }
  return result;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  const Eigen::Index n = traj.points.empty() ? 0 : traj.points.front().rows();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) os << ",p_" << i + 1 << j + 1;
  }
  os << ",min_eig,spd\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_real(traj.times[k]);
    const Mat& p = traj.points[k];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) os << ',' << format_real(p(i, j));
    }
    os << ',' << format_real(traj.min_eig[k]) << ',' << (traj.spd[k] ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string errors_csv(const RunResult& result) {
  std::ostringstream os;
  os << "t,integrator,frob_dist,affine_dist,spd\n";
  for (const auto& run : result.runs) {
    for (const auto& row : run.rows) {
      os << format_real(row.t) << ',' << row.integrator << ',' << format_real(row.frob_dist) << ','
         << (row.affine_dist ? format_real(*row.affine_dist) : std::string("NA")) << ','
         << (row.spd ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

void write_run_csv(const RunResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "reference.csv", trajectory_csv(result.reference));
  for (const auto& run : result.runs) {
    write_file(out_dir / (run.name + ".csv"), trajectory_csv(run.trajectory));
  }
  write_file(out_dir / "errors.csv", errors_csv(result));
}

// ---- bounds -----------------------------------------------------------------

BoundsReport compute_bounds(const ExperimentConfig& cfg, BoundsField field) {
  validate(cfg);
  const Model model = build_model(cfg);
  BoundsReport report;
  report.field = field;
  report.h = cfg.step();
  if (field == BoundsField::Euler) {
    report.direction = model.tangent(cfg.p0, cfg.t0, model.aux0);
  } else {
    report.direction = symmetrize((rk4_step(model, cfg.t0, cfg.p0, model.aux0, report.h) - cfg.p0) / report.h);
  }
  report.bounds = step_bounds(cfg.p0, report.direction);
  return report;
}

std::string format_bounds(const BoundsReport& report) {
  std::ostringstream os;
  os << "field=" << (report.field == BoundsField::Euler ? "euler" : "rk4")
     << " h=" << format_real(report.h)
     << " regime=" << (report.bounds.regime == BoundRegime::AllSafe ? "all_safe" : "bounded")
     << " rho_stay=" << format_real(report.bounds.rho_stay)
     << " rho_leave=" << format_real(report.bounds.rho_leave);
  return os.str();
}

// ---- convergence --------------------------------------------------------------

const ConvergenceSeries& ConvergenceReport::find(std::string_view name) const {
  for (const auto& s : series) {
    if (s.integrator == name) return s;
  }
  throw Error(ErrorKind::InvalidArgument, "no series named '" + std::string(name) + "'");
}

double fit_slope(const std::vector<double>& hs, const std::vector<double>& errors) {
  if (hs.size() != errors.size() || hs.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "slope fit needs at least two (h, error) pairs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0) || !(errors[i] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "slope fit needs positive steps and errors");
    }
    const double x = std::log(hs[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceProblem make_convergence_problem(const ConvergenceConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const Eigen::Index n = cfg.dim;
  ConvergenceProblem out;
  out.p0 = Mat::Identity(n, n) + 0.3 * Mat::Ones(n, n);
  const Mat a = random_normal(rng, n, 0.5);
  if (cfg.model_id == "linear") {
    out.model = linear_model(a);
  } else if (cfg.model_id == "oscillating") {
    out.model = oscillating_model(a, random_normal(rng, n, 0.5));
  } else if (cfg.model_id == "ou") {
    out.model = ou_model(a, random_normal(rng, n, 0.3));
  } else if (cfg.model_id == "riccati") {
    // The quadratic term drives finite-time blow-up forward in time, so
    // keep the gain and the state cost small on the study horizon.
    const Mat b = random_normal(rng, n, 0.1);
    const Mat g = random_normal(rng, n, 0.1);
    out.model = riccati_model(0.3 * a, b, g * g.transpose(), Mat::Identity(n, n));
  } else if (cfg.model_id == "gbm") {
    Vec m0(n);
    m0.setConstant(0.5);
    out.model = gbm_model(a, random_normal(rng, n, 0.3), m0);
  } else {
    throw Error(ErrorKind::Config, "unknown model '" + cfg.model_id + "'");
  }
  return out;
}

ConvergenceReport run_convergence(const ConvergenceConfig& cfg) {
  if (cfg.hs.size() < 2) throw Error(ErrorKind::Config, "need at least two step sizes");
  if (!(cfg.t1 > cfg.t0)) throw Error(ErrorKind::Config, "t1 must be greater than t0");
  if (cfg.reference_divisor < 1) throw Error(ErrorKind::Config, "reference divisor must be positive");
  const ConvergenceProblem problem = make_convergence_problem(cfg);
  const double span = cfg.t1 - cfg.t0;

  const double h_min = *std::min_element(cfg.hs.begin(), cfg.hs.end());
  const int ref_steps = steps_for(span, h_min) * cfg.reference_divisor;
  const auto ref_stepper = make_stepper(StepperKind::Rkmk4);
  const Trajectory ref =
      integrate(*ref_stepper, problem.model, problem.p0, linspace(cfg.t0, cfg.t1, ref_steps + 1));
  const Mat& p_ref = ref.points.back();

  ConvergenceReport report;
  for (StepperKind kind : cfg.integrators) {
    ConvergenceSeries s;
    s.integrator = std::string(to_string(kind));
    const auto stepper = make_stepper(kind);
    for (double h : cfg.hs) {
      const int steps = steps_for(span, h);
      const Trajectory traj =
          integrate(*stepper, problem.model, problem.p0, linspace(cfg.t0, cfg.t1, steps + 1));
      s.hs.push_back(h);
      s.errors.push_back((traj.points.back() - p_ref).norm());
    }
    s.exact = std::all_of(s.errors.begin(), s.errors.end(), [](double e) { return e <= kExactTol; });
    s.slope = s.exact ? std::numeric_limits<double>::quiet_NaN() : fit_slope(s.hs, s.errors);
    report.series.push_back(std::move(s));
  }
  return report;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "integrator,h,error\n";
  for (const auto& s : report.series) {
    for (std::size_t i = 0; i < s.hs.size(); ++i) {
      os << s.integrator << ',' << format_real(s.hs[i]) << ',' << format_real(s.errors[i]) << '\n';
    }
  }
  return os.str();
}

std::string format_convergence(const ConvergenceReport& report) {
  std::ostringstream os;
  for (const auto& s : report.series) {
    os << s.integrator << " slope=" << (s.exact ? std::string("exact") : format_real(s.slope)) << '\n';
  }
  return os.str();
}

}  // namespace spdflow::bench
