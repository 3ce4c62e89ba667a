#include "spdflow/integrators.hpp"

#include <cmath>
#include <sstream>

#include "spdflow/manifold.hpp"

namespace spdflow {

namespace {

void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::InvalidArgument, "step size must be positive and finite");
  }
}

class EuclideanStepper final : public Stepper {
 public:
  explicit EuclideanStepper(StepperKind kind) : kind_(kind) {}
  std::string_view name() const noexcept override { return to_string(kind_); }
  int order() const noexcept override { return kind_ == StepperKind::Euler ? 1 : 4; }
  bool preserves_manifold() const noexcept override { return kind_ == StepperKind::RiemannianRk4; }
  Mat step(const Model& model, double t, const Mat& p, const Vec& aux, double h) const override {
    switch (kind_) {
      case StepperKind::Euler: return euler_step(model, t, p, aux, h);
      case StepperKind::Rk4: return rk4_step(model, t, p, aux, h);
      default: return riemannian_rk4_step(model, t, p, aux, h);
    }
  }

 private:
  StepperKind kind_;
};

class LieStepper final : public Stepper {
 public:
  LieStepper(StepperKind kind, ActionKind action, int dexpinv_order)
      : kind_(kind), action_(make_action(action)), dexpinv_order_(dexpinv_order) {}
  std::string_view name() const noexcept override { return to_string(kind_); }
  int order() const noexcept override { return kind_ == StepperKind::LieEuler ? 1 : 4; }
  bool preserves_manifold() const noexcept override { return true; }
  Mat step(const Model& model, double t, const Mat& p, const Vec& aux, double h) const override {
    if (kind_ == StepperKind::LieEuler) return lie_euler_step(*action_, model, t, p, aux, h);
    return rkmk4_step(*action_, model, t, p, aux, h, dexpinv_order_);
  }

 private:
  StepperKind kind_;
  std::unique_ptr<HomogeneousAction> action_;
  int dexpinv_order_;
};

}  // namespace

Mat euler_step(const Model& model, double t, const Mat& p, const Vec& aux, double h) {
  require_step(h);
  return symmetrize(p + h * model.tangent(p, t, aux));
}

Mat rk4_step(const Model& model, double t, const Mat& p, const Vec& aux, double h) {
  require_step(h);
  const Vec aux_mid = model.aux_evolve(t, t + 0.5 * h, aux);
  const Vec aux_end = model.aux_evolve(t, t + h, aux);
  const Mat k1 = model.tangent(p, t, aux);
  const Mat k2 = model.tangent(p + 0.5 * h * k1, t + 0.5 * h, aux_mid);
  const Mat k3 = model.tangent(p + 0.5 * h * k2, t + 0.5 * h, aux_mid);
  const Mat k4 = model.tangent(p + h * k3, t + h, aux_end);
  return symmetrize(p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

Mat riemannian_rk4_step(const Model& model, double t, const Mat& p, const Vec& aux, double h) {
  const Mat increment = rk4_step(model, t, p, aux, h) - p;
  return affine_exp(p, symmetrize(increment));
}

Mat generator(const HomogeneousAction& action, const Model& model, const Mat& p, double t,
              const Vec& aux) {
  if (action.kind() == ActionKind::Congruence) return model.xi(p, t, aux);
  if (!model.has_siegel()) {
    throw Error(ErrorKind::ModelEvalFailure,
                "model '" + model.name + "' has no coefficients for the symplectic action");
  }
  return model.siegel_coeffs(p, t, aux).to_matrix();
}

Mat lie_euler_step(const HomogeneousAction& action, const Model& model, double t, const Mat& p,
                   const Vec& aux, double h) {
  require_step(h);
  const Mat a = h * generator(action, model, p, t, aux);
  return action.act(action.exp(a), p);
}

Mat rkmk4_step(const HomogeneousAction& action, const Model& model, double t, const Mat& p,
               const Vec& aux, double h, int dexpinv_order) {
  require_step(h);
  const Vec aux_mid = model.aux_evolve(t, t + 0.5 * h, aux);
  const Vec aux_end = model.aux_evolve(t, t + h, aux);
  auto field = [&](const Mat& theta, double s, const Vec& a) -> Mat {
    return h * generator(action, model, action.act(action.exp(theta), p), s, a);
  };

  const Mat k1 = h * generator(action, model, p, t, aux);
  const Mat a2 = field(0.5 * k1, t + 0.5 * h, aux_mid);
  const Mat k2 = dexpinv(0.5 * k1, a2, dexpinv_order);
  const Mat a3 = field(0.5 * k2, t + 0.5 * h, aux_mid);
  const Mat k3 = dexpinv(0.5 * k2, a3, dexpinv_order);
  const Mat a4 = field(k3, t + h, aux_end);
  const Mat k4 = dexpinv(k3, a4, dexpinv_order);
  const Mat theta = k1 / 6.0 + k2 / 3.0 + k3 / 3.0 + k4 / 6.0;
  return action.act(action.exp(theta), p);
}

std::string_view to_string(StepperKind kind) noexcept {
  switch (kind) {
    case StepperKind::Euler: return "euler";
    case StepperKind::Rk4: return "rk4";
    case StepperKind::RiemannianRk4: return "riemannian_rk4";
    case StepperKind::LieEuler: return "lie_euler";
    case StepperKind::Rkmk4: return "rkmk4";
  }
  return "unknown";
}

StepperKind stepper_from_string(std::string_view id) {
  for (auto kind : {StepperKind::Euler, StepperKind::Rk4, StepperKind::RiemannianRk4,
                    StepperKind::LieEuler, StepperKind::Rkmk4}) {
    if (to_string(kind) == id) return kind;
  }
  throw Error(ErrorKind::Config, "unknown integrator '" + std::string(id) + "'");
}

std::unique_ptr<Stepper> make_stepper(StepperKind kind, ActionKind action, int dexpinv_order) {
  if (kind == StepperKind::LieEuler || kind == StepperKind::Rkmk4) {
    return std::make_unique<LieStepper>(kind, action, dexpinv_order);
  }
  return std::make_unique<EuclideanStepper>(kind);
}

bool Trajectory::all_spd() const noexcept { return spd_failures() == 0; }

std::size_t Trajectory::spd_failures() const noexcept {
  std::size_t count = 0;
  for (bool ok : spd) count += ok ? 0 : 1;
  return count;
}

std::vector<double> linspace(double t0, double t1, int points) {
  if (points < 1) throw Error(ErrorKind::InvalidArgument, "grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = t0;
    return grid;
  }
  const double h = (t1 - t0) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = t0 + i * h;
  grid.back() = t1;
  return grid;
}

namespace {

void require_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "time grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "time grid must be strictly ascending");
    }
  }
}

void record(Trajectory& out, double t, const Mat& p) {
  const SpdCheck check = is_spd(p, 0.0);
  out.times.push_back(t);
  out.points.push_back(p);
  out.min_eig.push_back(check.min_eig);
  out.spd.push_back(check.spd);
}

}  // namespace

PartialTrajectory integrate_partial(const Stepper& stepper, const Model& model, const Mat& p0,
                                    std::span<const double> grid) {
  require_grid(grid);
  require_spd(p0, "P0");
  PartialTrajectory out;
  Mat p = p0;
  Vec aux = model.aux0;
  record(out.trajectory, grid[0], p);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t = grid[i];
    const double h = grid[i + 1] - t;
    try {
      p = stepper.step(model, t, p, aux, h);
    } catch (const Error& e) {
      std::ostringstream os;
      os << stepper.name() << " failed on interval " << i << " (t=" << t << "): " << e.what();
      out.failure.emplace(e.kind(), os.str());
      return out;
    }
    aux = model.aux_evolve(t, grid[i + 1], aux);
    record(out.trajectory, grid[i + 1], p);
  }
  return out;
}

Trajectory integrate(const Stepper& stepper, const Model& model, const Mat& p0,
                     std::span<const double> grid) {
  PartialTrajectory run = integrate_partial(stepper, model, p0, grid);
  if (run.failure) throw *run.failure;
  return std::move(run.trajectory);
}

Trajectory reference_trajectory(const Model& model, const Mat& p0, std::span<const double> grid,
                                int refine) {
  if (refine < 2) throw Error(ErrorKind::InvalidArgument, "refine must be at least 2");
  require_grid(grid);
  require_spd(p0, "P0");
  Trajectory out;
  Mat p = p0;
  Vec aux = model.aux0;
  record(out, grid[0], p);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t0 = grid[i];
    const double h = (grid[i + 1] - t0) / refine;
    for (int k = 0; k < refine; ++k) {
      const double t = t0 + k * h;
      p = rk4_step(model, t, p, aux, h);
      aux = model.aux_evolve(t, t + h, aux);
      if (!is_spd(p, 0.0).spd) {
        std::ostringstream os;
        os << "reference sub-iterate at t=" << t + h << " is not SPD; increase refine";
        throw Error(ErrorKind::ReferenceLeftManifold, os.str());
      }
    }
    record(out, grid[i + 1], p);
  }
  return out;
}

}  // namespace spdflow
