#include "spdflow/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace spdflow {

namespace {

void check_pair(const Mat& p, const Mat& t) {
  require_spd(p, "P");
  require_symmetric(t, "T");
  require_same_dim(p, t, "P and T");
}

}  // namespace

StepBounds step_bounds(const Mat& p, const Mat& t) {
  check_pair(p, t);
  const Vec lambda = sym_eig(p).values;
  const Vec nu = sym_eig(t).values;
  const Eigen::Index n = lambda.size();

  if (nu(0) >= 0.0) return {};

  StepBounds out;
  out.regime = BoundRegime::Bounded;
  out.rho_stay = -lambda(0) / nu(0);
  // Pairs (i, j) with i + j = n + 1 (1-based). A zero nu_i yields no finite
  // bound and is skipped.
  for (Eigen::Index i = 0; i < n && nu(i) < 0.0; ++i) {
    const Eigen::Index j = n - 1 - i;
    out.rho_leave = std::min(out.rho_leave, -lambda(j) / nu(i));
  }
  return out;
}

bool spd_after_step(const Mat& p, const Mat& t, double rho) {
  check_pair(p, t);
  if (!(rho >= 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be non-negative");
  return is_spd(p + rho * t, 0.0).spd;
}

double affine_distance(const Mat& p1, const Mat& p2) {
  require_same_dim(p1, p2, "affine_distance");
  const Mat w = invsqrtm_spd(p1);
  const Mat inner = symmetrize(w * p2 * w);
  return logm_spd(inner).norm();
}

Mat affine_exp(const Mat& p, const Mat& sigma) {
  require_symmetric(sigma, "Sigma");
  require_same_dim(p, sigma, "affine_exp");
  const EigenSym eig = sym_eig(p);
  if (!(eig.values(0) > 0.0)) throw Error(ErrorKind::NotSpd, "affine_exp base point is not SPD");
  const Mat root = spectral_apply(eig, [](double x) { return std::sqrt(x); });
  const Mat inv_root = spectral_apply(eig, [](double x) { return 1.0 / std::sqrt(x); });
  const Mat inner = symmetrize(inv_root * sigma * inv_root);
  return symmetrize(root * expm(inner) * root);
}

}  // namespace spdflow
