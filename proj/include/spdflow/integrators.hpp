#pragma once

// Fixed-step integrators for models on the SPD cone and the trajectory
// driver.
//
// Euclidean schemes (Euler, RK4) work on the ambient space of symmetric
// matrices and may leave the cone. Riemannian RK4 retracts the RK4
// increment with the affine-invariant exponential. Lie-Euler and RKMK4 run
// in the Lie algebra of a HomogeneousAction and map back through the group
// action, so every iterate stays on the cone.
//
// Steppers take the auxiliary state at time t and evolve it to each stage
// time with Model::aux_evolve.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spdflow/actions.hpp"
#include "spdflow/models.hpp"

namespace spdflow {

Mat euler_step(const Model& model, double t, const Mat& p, const Vec& aux, double h);
Mat rk4_step(const Model& model, double t, const Mat& p, const Vec& aux, double h);
Mat riemannian_rk4_step(const Model& model, double t, const Mat& p, const Vec& aux, double h);
Mat lie_euler_step(const HomogeneousAction& action, const Model& model, double t, const Mat& p,
                   const Vec& aux, double h);
Mat rkmk4_step(const HomogeneousAction& action, const Model& model, double t, const Mat& p,
               const Vec& aux, double h, int dexpinv_order = 4);

/// The algebra element driving `model` under `action`: xi for congruence,
/// the packed sp(2n) coefficients for the symplectic action.
Mat generator(const HomogeneousAction& action, const Model& model, const Mat& p, double t,
              const Vec& aux);

class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual int order() const noexcept = 0;
  /// Whether every output is guaranteed to be SPD.
  virtual bool preserves_manifold() const noexcept = 0;
  virtual Mat step(const Model& model, double t, const Mat& p, const Vec& aux, double h) const = 0;
};

enum class StepperKind { Euler, Rk4, RiemannianRk4, LieEuler, Rkmk4 };

std::string_view to_string(StepperKind kind) noexcept;
StepperKind stepper_from_string(std::string_view id);

/// Lie steppers default to the congruence action.
std::unique_ptr<Stepper> make_stepper(StepperKind kind, ActionKind action = ActionKind::Congruence,
                                      int dexpinv_order = 4);

struct Trajectory {
  std::vector<double> times;
  std::vector<Mat> points;
  std::vector<double> min_eig;
  std::vector<bool> spd;

  std::size_t size() const noexcept { return times.size(); }
  bool all_spd() const noexcept;
  std::size_t spd_failures() const noexcept;
};

/// `points` evenly spaced values from t0 to t1 inclusive.
std::vector<double> linspace(double t0, double t1, int points);

/// Runs `stepper` over consecutive grid intervals. An iterate that leaves
/// the cone is flagged, not fatal. Step errors are rethrown with the index
/// of the failing interval.
Trajectory integrate(const Stepper& stepper, const Model& model, const Mat& p0,
                     std::span<const double> grid);

/// Like integrate, but a step error ends the trajectory early instead of
/// propagating; the error is returned alongside the points computed so far.
struct PartialTrajectory {
  Trajectory trajectory;
  std::optional<Error> failure;
};

PartialTrajectory integrate_partial(const Stepper& stepper, const Model& model, const Mat& p0,
                                    std::span<const double> grid);

/// Classical RK4 with each grid interval split `refine` times, sampled back
/// onto the grid. Throws ReferenceLeftManifold if any sub-iterate is not
/// SPD.
Trajectory reference_trajectory(const Model& model, const Mat& p0, std::span<const double> grid,
                                int refine = 512);

}  // namespace spdflow
