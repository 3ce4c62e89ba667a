#pragma once

// Transitive Lie group actions on the SPD cone.
//
// Two actions are provided:
//   * congruence: GL(n) acting by M P M^T, algebra gl(n) = all n x n
//     matrices, infinitesimal action A P + P A^T;
//   * symplectic: SP(2n) acting by the linear fractional map
//     (A P + B)(C P + D)^{-1}, algebra sp(2n) = [[A, B], [C, -A^T]] with
//     B, C symmetric, infinitesimal action A P + P A^T + B - P C P.
//
// Both are exposed as free functions and behind HomogeneousAction, which is
// what the Lie group integrators consume. Group and algebra elements travel
// as plain matrices (n x n for congruence, 2n x 2n for the symplectic case).

#include <cstdint>
#include <memory>
#include <string_view>

#include "spdflow/matcore.hpp"

namespace spdflow {

enum class ActionKind { Congruence, Symplectic };

class HomogeneousAction {
 public:
  virtual ~HomogeneousAction() = default;

  virtual ActionKind kind() const noexcept = 0;
  virtual std::string_view name() const noexcept = 0;

  /// Side length of group / algebra matrices acting on n x n SPD points.
  virtual Eigen::Index group_dim(Eigen::Index n) const noexcept = 0;

  virtual Mat act(const Mat& g, const Mat& p) const = 0;
  virtual Mat algebra_act(const Mat& a, const Mat& p) const = 0;
  virtual Mat exp(const Mat& a) const { return expm(a); }
};

// ---- congruence -----------------------------------------------------------

/// Invertibility threshold for group elements, relative to the largest
/// LU pivot.
inline constexpr double kDetTol = 1e-13;

/// M P M^T (re-symmetrized). Throws Singular if M is not invertible.
Mat congruence_act(const Mat& m, const Mat& p);

/// A P + P A^T
Mat congruence_algebra(const Mat& a, const Mat& p);

class CongruenceAction final : public HomogeneousAction {
 public:
  ActionKind kind() const noexcept override { return ActionKind::Congruence; }
  std::string_view name() const noexcept override { return "congruence"; }
  Eigen::Index group_dim(Eigen::Index n) const noexcept override { return n; }
  Mat act(const Mat& g, const Mat& p) const override { return congruence_act(g, p); }
  Mat algebra_act(const Mat& a, const Mat& p) const override { return congruence_algebra(a, p); }
};

// ---- symplectic -----------------------------------------------------------

/// sp(2n) element [[a, b], [c, -a^T]] stored by blocks.
struct SpAlgebraElem {
  Mat a;
  Mat b;  // symmetric
  Mat c;  // symmetric

  Eigen::Index dim() const noexcept { return a.rows(); }
  Mat to_matrix() const;
  /// Reads the blocks of a 2n x 2n matrix; throws NotSymplectic if it is
  /// not in sp(2n) within `tol` (relative to max(1, ||m||_F)).
  static SpAlgebraElem from_matrix(const Mat& m, double tol = 1e-8);
};

/// J = [[0, I], [-I, 0]]
Mat symplectic_form(Eigen::Index n);

/// ||M^T J M - J||_F <= tol
bool is_symplectic(const Mat& m, double tol = 1e-8);

/// (A P + B)(C P + D)^{-1} for M = [[A, B], [C, D]].
/// Throws NotSymplectic, Singular (C P + D not invertible) or NotSpd when
/// the image leaves the cone.
Mat siegel_act(const Mat& m, const Mat& p);

/// A P + P A^T + B - P C P
Mat siegel_algebra(const SpAlgebraElem& a, const Mat& p);

/// expm of a random sp(2n) element whose Frobenius norm equals `scale`.
Mat random_symplectic(std::uint64_t seed, Eigen::Index n, double scale);

/// Random sp(2n) element with Frobenius norm `scale`.
SpAlgebraElem random_sp_algebra(std::uint64_t seed, Eigen::Index n, double scale);

class SymplecticAction final : public HomogeneousAction {
 public:
  ActionKind kind() const noexcept override { return ActionKind::Symplectic; }
  std::string_view name() const noexcept override { return "symplectic"; }
  Eigen::Index group_dim(Eigen::Index n) const noexcept override { return 2 * n; }
  Mat act(const Mat& g, const Mat& p) const override { return siegel_act(g, p); }
  Mat algebra_act(const Mat& a, const Mat& p) const override {
    return siegel_algebra(SpAlgebraElem::from_matrix(a), p);
  }
};

std::unique_ptr<HomogeneousAction> make_action(ActionKind kind);

}  // namespace spdflow
