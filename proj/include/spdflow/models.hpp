#pragma once

// ODEs on the SPD cone written as dP/dt = xi(P,t) P + P xi(P,t)^T.
//
// A Model bundles the generator xi (into gl(n)), the explicit right-hand
// side, optional coefficients for the symplectic action, and an auxiliary
// state (the mean vector for geometric Brownian motion) with its exact
// evolution.

#include <functional>
#include <string>

#include "spdflow/actions.hpp"
#include "spdflow/matcore.hpp"

namespace spdflow {

struct Model {
  using Field = std::function<Mat(const Mat& p, double t, const Vec& aux)>;
  using SpField = std::function<SpAlgebraElem(const Mat& p, double t, const Vec& aux)>;
  using AuxFlow = std::function<Vec(double t0, double t1, const Vec& aux)>;

  std::string name;
  Eigen::Index dim = 0;
  Field xi;       // into gl(n)
  Field tangent;  // dP/dt
  AuxFlow aux_evolve;  // aux(t1) from aux(t0); identity when there is none
  Vec aux0;            // auxiliary state at the model's initial time
  SpField siegel_coeffs;  // empty when the model has no sp(2n) form

  bool has_siegel() const noexcept { return static_cast<bool>(siegel_coeffs); }
};

/// dP/dt = A P + P A^T, xi = A.
Model linear_model(const Mat& a);

/// Ornstein-Uhlenbeck covariance: dP/dt = A P + P A^T + B B^T,
/// xi = A + 1/2 B B^T P^{-1}.
Model ou_model(const Mat& a, const Mat& b);

/// Multivariate geometric Brownian motion with theta = A + 1/2 B^2:
///   dm/dt = theta m   (evolved exactly)
///   dP/dt = theta P + P theta^T + B (P + m m^T) B^T
///   xi    = theta + 1/2 B (P + m m^T) B^T P^{-1}
Model gbm_model(const Mat& a, const Mat& b, const Vec& m0);

/// LQR Riccati equation dP/dt = -(A P + P A^T - P B R^{-1} B^T P + Q),
/// xi = -A + 1/2 P B R^{-1} B^T - 1/2 Q P^{-1}. Symplectic coefficients
/// (-A, -Q, -B R^{-1} B^T).
Model riccati_model(const Mat& a, const Mat& b, const Mat& q, const Mat& r);

/// Time-dependent linear model xi(t) = A + sin(t) C.
Model oscillating_model(const Mat& a, const Mat& c);

// ---- case study -----------------------------------------------------------

enum class CaseStudy { One, Two };

struct CaseStudyParams {
  Mat a;
  Mat b;
  Mat p0;
  Vec m0;
  double t0 = 0.0;
  double t1 = 0.0;
  int points = 0;

  double step() const noexcept { return (t1 - t0) / (points - 1); }
};

/// Builds the two-dimensional GBM experiment. B = O D O^T with columns of O
/// ordered by ascending eigenvalue of B and sign-fixed so the entry of
/// largest magnitude is positive; A = O D' O^T. `swap_pairing` pairs the
/// diagonal of D' with the eigenvectors in reverse order.
CaseStudyParams make_case_study(CaseStudy which, bool swap_pairing = false);

Model case_study_model(const CaseStudyParams& params);

}  // namespace spdflow
