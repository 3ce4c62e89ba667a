#pragma once

// Geometry of the SPD cone: step-size admissibility bounds for additive
// updates P + rho T, and the affine-invariant distance and exponential map.

#include <limits>

#include "spdflow/matcore.hpp"

namespace spdflow {

enum class BoundRegime { AllSafe, Bounded };

/// Admissible step sizes for P + rho T.
///
/// rho_stay: every rho < rho_stay keeps P + rho T positive definite.
/// rho_leave: every rho >= rho_leave makes P + rho T leave the cone.
/// Steps in between are undecided. For a positive semidefinite T both are
/// +infinity.
struct StepBounds {
  double rho_stay = std::numeric_limits<double>::infinity();
  double rho_leave = std::numeric_limits<double>::infinity();
  BoundRegime regime = BoundRegime::AllSafe;
};

/// Weyl-inequality bounds. With lambda ascending eigenvalues of P and nu
/// ascending eigenvalues of T:
///   rho_stay  = -lambda_1 / nu_1
///   rho_leave = min over i with nu_i < 0 of -lambda_{n+1-i} / nu_i
StepBounds step_bounds(const Mat& p, const Mat& t);

/// Direct check: smallest eigenvalue of P + rho T is positive.
bool spd_after_step(const Mat& p, const Mat& t, double rho);

/// ||log(P1^{-1/2} P2 P1^{-1/2})||_F
double affine_distance(const Mat& p1, const Mat& p2);

/// P^{1/2} exp(P^{-1/2} Sigma P^{-1/2}) P^{1/2}
Mat affine_exp(const Mat& p, const Mat& sigma);

}  // namespace spdflow
