#include "spdflow/models.hpp"

#include <cmath>
#include <limits>

namespace spdflow {

namespace {

/// X P^{-1} for symmetric P.
Mat times_inverse(const Mat& x, const Mat& p, const std::string& model) {
  Eigen::LDLT<Mat> ldlt(p);
  // LDLT zeroes null pivots instead of failing, so inspect them directly.
  const Vec d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(d.minCoeff() > std::numeric_limits<double>::epsilon() * d.maxCoeff())) {
    throw Error(ErrorKind::ModelEvalFailure, model + ": P is not invertible");
  }
  Mat out = ldlt.solve(x.transpose()).transpose();
  if (!out.allFinite()) throw Error(ErrorKind::ModelEvalFailure, model + ": P is numerically singular");
  return out;
}

Model::AuxFlow no_aux() {
  return [](double, double, const Vec& aux) { return aux; };
}

void require_model_square(const Mat& m, Eigen::Index n, const char* what) {
  require_square(m, what);
  require_finite(m, what);
  if (m.rows() != n) throw Error(ErrorKind::DimMismatch, std::string(what) + " has the wrong size");
}

}  // namespace

Model linear_model(const Mat& a) {
  require_square(a, "A");
  require_finite(a, "A");
  Model m;
  m.name = "linear";
  m.dim = a.rows();
  m.xi = [a](const Mat&, double, const Vec&) -> Mat { return a; };
  m.tangent = [a](const Mat& p, double, const Vec&) -> Mat { return congruence_algebra(a, p); };
  m.aux_evolve = no_aux();
  const Eigen::Index n = a.rows();
  m.siegel_coeffs = [a, n](const Mat&, double, const Vec&) {
    return SpAlgebraElem{a, Mat::Zero(n, n), Mat::Zero(n, n)};
  };
  return m;
}

Model ou_model(const Mat& a, const Mat& b) {
  require_square(a, "A");
  require_model_square(b, a.rows(), "B");
  const Mat bbt = symmetrize(b * b.transpose());
  const Eigen::Index n = a.rows();
  Model m;
  m.name = "ou";
  m.dim = n;
  m.xi = [a, bbt](const Mat& p, double, const Vec&) -> Mat {
    return a + 0.5 * times_inverse(bbt, p, "ou");
  };
  m.tangent = [a, bbt](const Mat& p, double, const Vec&) -> Mat {
    const Mat ap = a * p;
    return symmetrize(ap + ap.transpose() + bbt);
  };
  m.aux_evolve = no_aux();
  m.siegel_coeffs = [a, bbt, n](const Mat&, double, const Vec&) {
    return SpAlgebraElem{a, bbt, Mat::Zero(n, n)};
  };
  return m;
}

Model gbm_model(const Mat& a, const Mat& b, const Vec& m0) {
  require_square(a, "A");
  require_model_square(b, a.rows(), "B");
  if (m0.size() != a.rows()) throw Error(ErrorKind::DimMismatch, "m0 has the wrong length");
  const Mat theta = a + 0.5 * b * b;
  Model m;
  m.name = "gbm";
  m.dim = a.rows();
  m.aux0 = m0;
  m.aux_evolve = [theta](double t0, double t1, const Vec& mean) -> Vec {
    if (t1 == t0 || mean.isZero(0.0)) return mean;
    return expm((t1 - t0) * theta) * mean;
  };
  m.xi = [theta, b](const Mat& p, double, const Vec& mean) -> Mat {
    const Mat forcing = b * (p + mean * mean.transpose()) * b.transpose();
    return theta + 0.5 * times_inverse(forcing, p, "gbm");
  };
  m.tangent = [theta, b](const Mat& p, double, const Vec& mean) -> Mat {
    const Mat tp = theta * p;
    return symmetrize(tp + tp.transpose() + b * (p + mean * mean.transpose()) * b.transpose());
  };
  return m;
}

Model riccati_model(const Mat& a, const Mat& b, const Mat& q, const Mat& r) {
  require_square(a, "A");
  const Eigen::Index n = a.rows();
  require_model_square(b, n, "B");
  require_symmetric(q, "Q");
  require_model_square(q, n, "Q");
  if (!is_spd(q, -1e-12 * std::max(1.0, q.norm())).spd) {
    throw Error(ErrorKind::NotSpd, "Q must be positive semidefinite");
  }
  require_spd(r, "R");
  require_model_square(r, n, "R");
  const Mat gain = symmetrize(b * Eigen::LLT<Mat>(r).solve(b.transpose()));  // B R^{-1} B^T
  Model m;
  m.name = "riccati";
  m.dim = n;
  m.xi = [a, gain, q](const Mat& p, double, const Vec&) -> Mat {
    return -a + 0.5 * p * gain - 0.5 * times_inverse(q, p, "riccati");
  };
  m.tangent = [a, gain, q](const Mat& p, double, const Vec&) -> Mat {
    const Mat ap = a * p;
    return symmetrize(-(ap + ap.transpose() - p * gain * p + q));
  };
  m.aux_evolve = no_aux();
  m.siegel_coeffs = [a, gain, q](const Mat&, double, const Vec&) {
    return SpAlgebraElem{-a, -q, -gain};
  };
  return m;
}

Model oscillating_model(const Mat& a, const Mat& c) {
  require_square(a, "A");
  require_model_square(c, a.rows(), "C");
  const Eigen::Index n = a.rows();
  Model m;
  m.name = "oscillating";
  m.dim = n;
  m.xi = [a, c](const Mat&, double t, const Vec&) -> Mat { return a + std::sin(t) * c; };
  m.tangent = [a, c](const Mat& p, double t, const Vec&) -> Mat {
    return congruence_algebra(a + std::sin(t) * c, p);
  };
  m.aux_evolve = no_aux();
  m.siegel_coeffs = [a, c, n](const Mat&, double t, const Vec&) {
    return SpAlgebraElem{a + std::sin(t) * c, Mat::Zero(n, n), Mat::Zero(n, n)};
  };
  return m;
}

CaseStudyParams make_case_study(CaseStudy which, bool swap_pairing) {
  CaseStudyParams out;
  out.b.resize(2, 2);
  out.b << -0.4, 0.1, 0.1, -0.2;
  out.p0.resize(2, 2);
  out.p0 << 0.3383, -0.0716, -0.0716, 0.0743;
  out.m0 = Vec::Zero(2);

  EigenSym eig = sym_eig(out.b);
  Mat o = eig.vectors;
  for (Eigen::Index j = 0; j < o.cols(); ++j) {
    Eigen::Index arg = 0;
    o.col(j).cwiseAbs().maxCoeff(&arg);
    if (o(arg, j) < 0.0) o.col(j) *= -1.0;
  }

  Vec d(2);
  if (which == CaseStudy::One) {
    d << -10.0, -2.0;
    out.t1 = 2.0;
    out.points = 30;
  } else {
    d << -4.0, -8.0;
    out.t1 = 1.5;
    out.points = 11;
  }
  if (swap_pairing) d.reverseInPlace();
  out.a = o * d.asDiagonal() * o.transpose();
  return out;
}

Model case_study_model(const CaseStudyParams& params) {
  return gbm_model(params.a, params.b, params.m0);
}

}  // namespace spdflow
