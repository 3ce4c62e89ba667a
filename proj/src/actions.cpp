#include "spdflow/actions.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace spdflow {

namespace {

bool invertible(const Eigen::PartialPivLU<Mat>& lu) {
  const Vec pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = pivots.maxCoeff();
  return std::isfinite(largest) && largest > 0.0 && pivots.minCoeff() > kDetTol * largest;
}

Mat random_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

}  // namespace

Mat congruence_act(const Mat& m, const Mat& p) {
  require_square(m, "group element");
  require_finite(m, "group element");
  require_same_dim(m, p, "congruence_act");
  require_symmetric(p, "P");
  if (!invertible(Eigen::PartialPivLU<Mat>(m))) {
    throw Error(ErrorKind::Singular, "congruence_act: group element is not invertible");
  }
  return symmetrize(m * p * m.transpose());
}

Mat congruence_algebra(const Mat& a, const Mat& p) {
  require_square(a, "algebra element");
  require_same_dim(a, p, "congruence_algebra");
  const Mat ap = a * p;
  return symmetrize(ap + ap.transpose());
}

Mat SpAlgebraElem::to_matrix() const {
  const Eigen::Index n = dim();
  Mat m(2 * n, 2 * n);
  m << a, b, c, -a.transpose();
  return m;
}

SpAlgebraElem SpAlgebraElem::from_matrix(const Mat& m, double tol) {
  require_square(m, "sp(2n) element");
  if (m.rows() % 2 != 0) throw Error(ErrorKind::DimMismatch, "sp(2n) element must have even size");
  const Eigen::Index n = m.rows() / 2;
  SpAlgebraElem out{m.topLeftCorner(n, n), m.topRightCorner(n, n), m.bottomLeftCorner(n, n)};
  const double scale = std::max(1.0, m.norm());
  const double defect = (m.bottomRightCorner(n, n) + out.a.transpose()).norm() +
                        (out.b - out.b.transpose()).norm() + (out.c - out.c.transpose()).norm();
  if (defect > tol * scale) {
    throw Error(ErrorKind::NotSymplectic, "matrix is not in sp(2n)");
  }
  out.b = symmetrize(out.b);
  out.c = symmetrize(out.c);
  return out;
}

Mat symplectic_form(Eigen::Index n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return j;
}

bool is_symplectic(const Mat& m, double tol) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || !m.allFinite()) return false;
  const Mat j = symplectic_form(m.rows() / 2);
  return (m.transpose() * j * m - j).norm() <= tol;
}

Mat siegel_act(const Mat& m, const Mat& p) {
  require_square(m, "symplectic element");
  require_finite(m, "symplectic element");
  const Eigen::Index n = p.rows();
  if (m.rows() != 2 * n) {
    throw Error(ErrorKind::DimMismatch, "siegel_act: group element must be 2n x 2n");
  }
  require_symmetric(p, "P");
  const double scale = std::max(1.0, m.squaredNorm());
  if (!is_symplectic(m, 1e-8 * scale)) {
    throw Error(ErrorKind::NotSymplectic, "siegel_act: group element is not symplectic");
  }
  const Mat numer = m.topLeftCorner(n, n) * p + m.topRightCorner(n, n);
  const Mat denom = m.bottomLeftCorner(n, n) * p + m.bottomRightCorner(n, n);
  // X denom = numer  <=>  denom^T X^T = numer^T
  Eigen::PartialPivLU<Mat> lu(denom.transpose());
  if (!invertible(lu)) throw Error(ErrorKind::Singular, "siegel_act: C P + D is singular");
  const Mat out = symmetrize(lu.solve(numer.transpose()).transpose());
  const SpdCheck check = is_spd(out, 0.0);
  if (!check.spd) {
    std::ostringstream os;
    os << "siegel_act: image left the SPD cone (min eigenvalue " << check.min_eig << ")";
    throw Error(ErrorKind::NotSpd, os.str());
  }
  return out;
}

Mat siegel_algebra(const SpAlgebraElem& a, const Mat& p) {
  require_square(p, "P");
  require_same_dim(a.a, p, "siegel_algebra A block");
  require_same_dim(a.b, p, "siegel_algebra B block");
  require_same_dim(a.c, p, "siegel_algebra C block");
  require_symmetric(a.b, "B block");
  require_symmetric(a.c, "C block");
  const Mat ap = a.a * p;
  return symmetrize(ap + ap.transpose() + a.b - p * a.c * p);
}

SpAlgebraElem random_sp_algebra(std::uint64_t seed, Eigen::Index n, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale must be positive");
  std::mt19937_64 rng(seed);
  SpAlgebraElem e{random_gaussian(rng, n, n), symmetrize(random_gaussian(rng, n, n)),
                  symmetrize(random_gaussian(rng, n, n))};
  const double norm = e.to_matrix().norm();
  e.a *= scale / norm;
  e.b *= scale / norm;
  e.c *= scale / norm;
  return e;
}

Mat random_symplectic(std::uint64_t seed, Eigen::Index n, double scale) {
  return expm(random_sp_algebra(seed, n, scale).to_matrix());
}

std::unique_ptr<HomogeneousAction> make_action(ActionKind kind) {
  switch (kind) {
    case ActionKind::Congruence: return std::make_unique<CongruenceAction>();
    case ActionKind::Symplectic: return std::make_unique<SymplecticAction>();
  }
  return nullptr;
}

}  // namespace spdflow
