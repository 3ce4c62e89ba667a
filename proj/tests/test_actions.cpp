#include "doctest.h"
#include "spdflow/actions.hpp"
#include "test_util.hpp"

using namespace spdflow;
using spdflow::testing::random_cone_sp;
using spdflow::testing::random_matrix;
using spdflow::testing::random_spd;
using spdflow::testing::random_symmetric;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected spdflow::Error");
  return ErrorKind::InvalidArgument;
}

// Central difference of s -> act(exp(s a), p) at s = 0.
Mat fd_algebra(const HomogeneousAction& action, const Mat& a, const Mat& p, double s = 1e-5) {
  return (action.act(action.exp(s * a), p) - action.act(action.exp(-s * a), p)) / (2.0 * s);
}

Mat block_diag_symplectic(const Mat& g) {
  const Eigen::Index n = g.rows();
  Mat m = Mat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = g;
  m.bottomRightCorner(n, n) = g.inverse().transpose();
  return m;
}

}  // namespace

TEST_CASE("congruence action axioms") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    const Mat p = random_spd(rng, n);
    const Mat m1 = random_matrix(rng, n, n) + 2.0 * Mat::Identity(n, n);
    const Mat m2 = random_matrix(rng, n, n) + 2.0 * Mat::Identity(n, n);
    CHECK((congruence_act(Mat::Identity(n, n), p) - p).norm() <= 1e-12 * p.norm());
    const Mat lhs = congruence_act(m1 * m2, p);
    CHECK((lhs - congruence_act(m1, congruence_act(m2, p))).norm() <= 1e-10 * lhs.norm());
  }
}

TEST_CASE("congruence action is transitive") {
  std::mt19937_64 rng(32);
  const Mat x = random_spd(rng, 3);
  const Mat y = random_spd(rng, 3);
  const Mat g = sqrtm_spd(y) * invsqrtm_spd(x);
  CHECK((congruence_act(g, x) - y).norm() <= 1e-10 * y.norm());
}

TEST_CASE("congruence algebra action matches the derivative of the group action") {
  std::mt19937_64 rng(33);
  CongruenceAction action;
  for (int trial = 0; trial < 100; ++trial) {
    const Mat p = random_spd(rng, 3);
    const Mat a = random_matrix(rng, 3, 3);
    const Mat exact = congruence_algebra(a, p);
    CHECK((fd_algebra(action, a, p) - exact).norm() <= 1e-6 * std::max(1.0, exact.norm()));
    CHECK((exact - (a * p + p * a.transpose())).norm() <= 1e-12 * exact.norm());
  }
}

TEST_CASE("congruence action rejects singular elements and asymmetric points") {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1.0;
  CHECK(kind_of([&] { congruence_act(m, Mat::Identity(2, 2)); }) == ErrorKind::Singular);
  Mat p(2, 2);
  p << 1.0, 0.5, 0.0, 1.0;
  CHECK(kind_of([&] { congruence_act(Mat::Identity(2, 2), p); }) == ErrorKind::NotSymmetric);
  CHECK(kind_of([] { congruence_act(Mat::Identity(3, 3), Mat::Identity(2, 2)); }) ==
        ErrorKind::DimMismatch);
}

TEST_CASE("sp(2n) elements round-trip through their block form") {
  const SpAlgebraElem e = random_sp_algebra(7, 3, 1.5);
  CHECK(e.to_matrix().norm() == doctest::Approx(1.5));
  const Mat m = e.to_matrix();
  const Mat j = symplectic_form(3);
  // Hamiltonian condition m^T J + J m = 0.
  CHECK((m.transpose() * j + j * m).norm() < 1e-12);
  const SpAlgebraElem back = SpAlgebraElem::from_matrix(m);
  CHECK((back.a - e.a).norm() == 0.0);
  Mat bad = m;
  bad(0, 4) += 1.0;  // breaks the symmetry of B
  CHECK(kind_of([&] { SpAlgebraElem::from_matrix(bad); }) == ErrorKind::NotSymplectic);
}

TEST_CASE("exponentials of sp(2n) elements are symplectic") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(is_symplectic(random_symplectic(seed, 3, 1.0)));
  }
  CHECK_FALSE(is_symplectic(2.0 * Mat::Identity(4, 4)));
  CHECK_FALSE(is_symplectic(Mat::Identity(3, 3)));
}

TEST_CASE("symplectic action axioms") {
  std::mt19937_64 rng(34);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 3);
    const Mat p = random_spd(rng, n);
    const Mat m1 = expm(random_cone_sp(rng, n, 0.3));
    const Mat m2 = expm(random_cone_sp(rng, n, 0.3));
    CHECK((siegel_act(Mat::Identity(2 * n, 2 * n), p) - p).norm() <= 1e-12 * p.norm());
    const Mat lhs = siegel_act(m1 * m2, p);
    CHECK((lhs - siegel_act(m1, siegel_act(m2, p))).norm() <= 1e-9 * lhs.norm());
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("block-diagonal symplectic elements act by congruence") {
  std::mt19937_64 rng(35);
  const Mat p = random_spd(rng, 3);
  const Mat g = random_matrix(rng, 3, 3) + 2.0 * Mat::Identity(3, 3);
  const Mat m = block_diag_symplectic(g);
  CHECK(is_symplectic(m, 1e-10 * m.squaredNorm()));
  CHECK((siegel_act(m, p) - congruence_act(g, p)).norm() <= 1e-10 * p.norm());
}

TEST_CASE("symplectic algebra action matches the derivative of the group action") {
  std::mt19937_64 rng(36);
  SymplecticAction action;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Mat p = random_spd(rng, 3);
    const SpAlgebraElem e = random_sp_algebra(seed + 100, 3, 1.0);
    const Mat exact = siegel_algebra(e, p);
    CHECK((fd_algebra(action, e.to_matrix(), p) - exact).norm() <= 1e-6 * std::max(1.0, exact.norm()));
    const Mat expected = e.a * p + p * e.a.transpose() + e.b - p * e.c * p;
    CHECK((exact - expected).norm() <= 1e-12 * std::max(1.0, exact.norm()));
  }
}

TEST_CASE("symplectic action error cases") {
  const Mat p = Mat::Identity(2, 2);
  CHECK(kind_of([&] { siegel_act(2.0 * Mat::Identity(4, 4), p); }) == ErrorKind::NotSymplectic);
  CHECK(kind_of([&] { siegel_act(Mat::Identity(2, 2), p); }) == ErrorKind::DimMismatch);
  // [[I, 0], [-I, I]] is symplectic; with P = I the denominator C P + D vanishes.
  Mat m = Mat::Identity(4, 4);
  m.bottomLeftCorner(2, 2) = -Mat::Identity(2, 2);
  CHECK(is_symplectic(m));
  CHECK(kind_of([&] { siegel_act(m, p); }) == ErrorKind::Singular);
  // [[I, -2I], [0, I]] translates P = I to -I.
  Mat shift = Mat::Identity(4, 4);
  shift.topRightCorner(2, 2) = -2.0 * Mat::Identity(2, 2);
  CHECK(kind_of([&] { siegel_act(shift, p); }) == ErrorKind::NotSpd);
}

TEST_CASE("action objects report their shape") {
  const auto c = make_action(ActionKind::Congruence);
  const auto s = make_action(ActionKind::Symplectic);
  CHECK(c->name() == "congruence");
  CHECK(s->name() == "symplectic");
  CHECK(c->group_dim(3) == 3);
  CHECK(s->group_dim(3) == 6);
  std::mt19937_64 rng(37);
  const Mat p = random_spd(rng, 2);
  const Mat a = random_symmetric(rng, 2);
  CHECK((c->algebra_act(a, p) - congruence_algebra(a, p)).norm() == 0.0);
}
