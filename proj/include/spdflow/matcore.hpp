#pragma once

// Dense real matrix kernels shared by the rest of the library.
//
// Matrices are plain Eigen dynamic matrices. Functions that require a
// symmetric or positive definite argument validate it and throw
// spdflow::Error with the matching ErrorKind.

#include <Eigen/Dense>

#include "spdflow/error.hpp"

namespace spdflow {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Tolerances used by the validation helpers. The defaults are the module
/// constants; callers may pass their own.
struct Tolerances {
  double sym = 1e-10;  // relative asymmetry allowed, scaled by max(1, ||S||_F)
  double pd = 1e-12;   // pivot threshold, scaled by max(1, trace/n)
};

inline constexpr Tolerances kDefaultTolerances{};

// ---- validation -----------------------------------------------------------

bool all_finite(const Mat& m);
bool is_symmetric(const Mat& s, double sym_tol = kDefaultTolerances.sym);

void require_finite(const Mat& m, const char* what);
void require_square(const Mat& m, const char* what);
void require_same_dim(const Mat& a, const Mat& b, const char* what);
void require_symmetric(const Mat& s, const char* what,
                       double sym_tol = kDefaultTolerances.sym);

/// Pivot threshold for the SPD test: pd_rel * max(1, trace(S)/n).
double pd_threshold(const Mat& s, double pd_rel = kDefaultTolerances.pd);

/// Throws NotSpd unless the Cholesky factorization of `p` succeeds with
/// every pivot above pd_threshold(p).
void require_spd(const Mat& p, const char* what,
                 const Tolerances& tol = kDefaultTolerances);

/// (S + S^T) / 2
Mat symmetrize(const Mat& s);

// ---- spectral kernels -----------------------------------------------------

struct EigenSym {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns, S = Q diag(values) Q^T
};

EigenSym sym_eig(const Mat& s);

/// Q f(diag) Q^T for a symmetric argument.
template <typename F>
Mat spectral_apply(const EigenSym& eig, F&& f) {
  Vec mapped = eig.values.unaryExpr(std::forward<F>(f));
  Mat out = eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
  return symmetrize(out);
}

/// Matrix exponential. Symmetric input goes through the spectral route,
/// everything else through degree-13 Pade scaling and squaring.
Mat expm(const Mat& m);

/// The Pade path alone, exposed so tests can exercise it on symmetric
/// input as well.
Mat expm_pade(const Mat& m);

// Spectral functions of an SPD argument. They throw NotSpd when the
// smallest eigenvalue is not strictly positive.
Mat sqrtm_spd(const Mat& p);
Mat invsqrtm_spd(const Mat& p);
Mat logm_spd(const Mat& p);

// ---- Lie algebra helpers --------------------------------------------------

/// [A, B] = AB - BA
Mat commutator(const Mat& a, const Mat& b);

/// Truncated dexp^{-1}_theta(A) series for the left flow Y' = A Y:
///   A - 1/2 [t,A] + 1/12 [t,[t,A]] - 1/720 [t,[t,[t,[t,A]]]]
/// `order` selects how many terms survive: 1 -> A - 1/2[t,A],
/// 2 -> adds the 1/12 term, 4 -> adds the 1/720 term. The cubic
/// Bernoulli coefficient is zero, so orders 2 and 3 coincide and 3 is
/// rejected to keep callers explicit.
Mat dexpinv(const Mat& theta, const Mat& a, int order = 4);

struct SpdCheck {
  bool spd;
  double min_eig;
};

/// Membership diagnostic: spd is true iff the smallest eigenvalue exceeds
/// `tol`. Never throws on indefinite input.
SpdCheck is_spd(const Mat& s, double tol = 0.0);

}  // namespace spdflow
