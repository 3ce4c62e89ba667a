#include "spdflow/matcore.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace spdflow {

namespace {

std::string dims(const Mat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

double one_norm(const Mat& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// Higham (2005) degree-m Pade approximant r_m(A) = q_m(A)^{-1} p_m(A);
// p_m(A) = U + V and q_m(A) = -U + V with U odd, V even in A.
Mat pade_solve(const Mat& u, const Mat& v) {
  const Mat numer = v + u;
  const Mat denom = v - u;
  Eigen::PartialPivLU<Mat> lu(denom);
  return lu.solve(numer);
}

template <std::size_t N>
Mat pade_low(const Mat& a, const std::array<double, N>& b) {
  // Degrees 3, 5, 7, 9: evaluate with even powers of A.
  const Eigen::Index n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  Mat pow = ident;
  Mat u_inner = Mat::Zero(n, n);
  Mat v = Mat::Zero(n, n);
  for (std::size_t k = 0; k < N; k += 2) {
    v += b[k] * pow;
    u_inner += b[k + 1] * pow;
    pow = pow * a2;
  }
  return pade_solve(a * u_inner, v);
}

Mat pade13(const Mat& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                     b[3] * a2 + b[1] * ident);
  const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                b[2] * a2 + b[0] * ident;
  return pade_solve(u, v);
}

EigenSym checked_spd_eig(const Mat& p, const char* what) {
  require_symmetric(p, what);
  EigenSym eig = sym_eig(p);
  if (!(eig.values(0) > 0.0)) {
    std::ostringstream os;
    os << what << ": minimum eigenvalue " << eig.values(0) << " is not positive";
    throw Error(ErrorKind::NotSpd, os.str());
  }
  return eig;
}

}  // namespace

bool all_finite(const Mat& m) { return m.allFinite(); }

bool is_symmetric(const Mat& s, double sym_tol) {
  if (s.rows() != s.cols()) return false;
  const double scale = std::max(1.0, s.norm());
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= sym_tol * scale;
}

void require_finite(const Mat& m, const char* what) {
  if (!all_finite(m)) throw Error(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
}

void require_square(const Mat& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(ErrorKind::DimMismatch, std::string(what) + " must be square and non-empty, got " + dims(m));
  }
}

void require_same_dim(const Mat& a, const Mat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimMismatch, std::string(what) + ": " + dims(a) + " vs " + dims(b));
  }
}

void require_symmetric(const Mat& s, const char* what, double sym_tol) {
  require_square(s, what);
  require_finite(s, what);
  if (!is_symmetric(s, sym_tol)) throw Error(ErrorKind::NotSymmetric, std::string(what) + " is not symmetric");
}

double pd_threshold(const Mat& s, double pd_rel) {
  const double n = static_cast<double>(s.rows());
  return pd_rel * std::max(1.0, s.trace() / n);
}

void require_spd(const Mat& p, const char* what, const Tolerances& tol) {
  require_symmetric(p, what, tol.sym);
  Eigen::LLT<Mat> llt(p);
  const double thr = pd_threshold(p, tol.pd);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Mat& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < p.rows() && ok; ++i) ok = l(i, i) * l(i, i) > thr;
  }
  if (!ok) throw Error(ErrorKind::NotSpd, std::string(what) + " is not positive definite");
}

Mat symmetrize(const Mat& s) { return 0.5 * (s + s.transpose()); }

EigenSym sym_eig(const Mat& s) {
  require_square(s, "sym_eig input");
  require_finite(s, "sym_eig input");
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetrize(s));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Mat expm_pade(const Mat& m) {
  require_square(m, "expm input");
  require_finite(m, "expm input");

  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9 = {
      17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
      2162160.0,     110880.0,     3960.0,       90.0,        1.0};

  const double norm = one_norm(m);
  Mat out;
  if (norm <= 1.495585217958292e-2) {
    out = pade_low(m, b3);
  } else if (norm <= 2.539398330063230e-1) {
    out = pade_low(m, b5);
  } else if (norm <= 9.504178996162932e-1) {
    out = pade_low(m, b7);
  } else if (norm <= 2.097847961257068) {
    out = pade_low(m, b9);
  } else {
    constexpr double theta13 = 5.371920351148152;
    int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    out = pade13(m / std::ldexp(1.0, squarings));
    for (int i = 0; i < squarings; ++i) out = out * out;
  }
  if (!out.allFinite()) {
    std::ostringstream os;
    os << "matrix exponential overflowed (1-norm of argument " << norm << ")";
    throw Error(ErrorKind::NonFinite, os.str());
  }
  return out;
}

Mat expm(const Mat& m) {
  require_square(m, "expm input");
  require_finite(m, "expm input");
  if (is_symmetric(m, 0.0)) {
    const EigenSym eig = sym_eig(m);
    Mat out = spectral_apply(eig, [](double x) { return std::exp(x); });
    if (!out.allFinite()) {
      std::ostringstream os;
      os << "matrix exponential overflowed (largest eigenvalue " << eig.values.maxCoeff() << ")";
      throw Error(ErrorKind::NonFinite, os.str());
    }
    return out;
  }
  return expm_pade(m);
}

Mat sqrtm_spd(const Mat& p) {
  return spectral_apply(checked_spd_eig(p, "sqrtm_spd input"), [](double x) { return std::sqrt(x); });
}

Mat invsqrtm_spd(const Mat& p) {
  return spectral_apply(checked_spd_eig(p, "invsqrtm_spd input"),
                        [](double x) { return 1.0 / std::sqrt(x); });
}

Mat logm_spd(const Mat& p) {
  return spectral_apply(checked_spd_eig(p, "logm_spd input"), [](double x) { return std::log(x); });
}

Mat commutator(const Mat& a, const Mat& b) {
  require_square(a, "commutator lhs");
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

Mat dexpinv(const Mat& theta, const Mat& a, int order) {
  require_square(theta, "dexpinv theta");
  require_same_dim(theta, a, "dexpinv");
  if (order != 1 && order != 2 && order != 4) {
    throw Error(ErrorKind::UnsupportedOrder, "dexpinv order must be 1, 2 or 4, got " + std::to_string(order));
  }
  // Left-trivialized series (flow Y' = xi Y): Bernoulli weights B_k / k!.
  const Mat c1 = commutator(theta, a);
  Mat out = a - 0.5 * c1;
  if (order == 1) return out;
  const Mat c2 = commutator(theta, c1);
  out += c2 / 12.0;
  if (order == 2) return out;
  const Mat c4 = commutator(theta, commutator(theta, c2));
  out -= c4 / 720.0;
  return out;
}

SpdCheck is_spd(const Mat& s, double tol) {
  if (s.rows() < 1 || s.rows() != s.cols() || !s.allFinite()) {
    return {false, std::numeric_limits<double>::quiet_NaN()};
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetrize(s), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) return {false, std::numeric_limits<double>::quiet_NaN()};
  const double min_eig = solver.eigenvalues()(0);
  return {min_eig > tol, min_eig};
}

}  // namespace spdflow
