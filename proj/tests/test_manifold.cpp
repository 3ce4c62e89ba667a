#include <cmath>
#include <limits>

#include "doctest.h"
#include "spdflow/actions.hpp"
#include "spdflow/manifold.hpp"
#include "test_util.hpp"

using namespace spdflow;
using spdflow::testing::random_matrix;
using spdflow::testing::random_spd;
using spdflow::testing::random_symmetric;

namespace {

Mat diag(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

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

}  // namespace

TEST_CASE("step bounds for a uniform contraction") {
  const StepBounds b = step_bounds(Mat::Identity(3, 3), -2.0 * Mat::Identity(3, 3));
  CHECK(b.regime == BoundRegime::Bounded);
  CHECK(b.rho_stay == doctest::Approx(0.5));
  CHECK(b.rho_leave == doctest::Approx(0.5));
}

TEST_CASE("a positive semidefinite direction is always safe") {
  std::mt19937_64 rng(21);
  const Mat g = random_matrix(rng, 3, 3);
  const StepBounds b = step_bounds(random_spd(rng, 3), g * g.transpose());
  CHECK(b.regime == BoundRegime::AllSafe);
  CHECK(std::isinf(b.rho_stay));
  CHECK(std::isinf(b.rho_leave));
  const StepBounds zero = step_bounds(Mat::Identity(2, 2), Mat::Zero(2, 2));
  CHECK(zero.regime == BoundRegime::AllSafe);
}

TEST_CASE("step bounds on diagonal pairs by hand") {
  // lambda = (1, 4), nu = (-2, -1): stay = 1/2, leave = min(4/2, 1/1) = 1.
  const StepBounds b = step_bounds(diag(1.0, 4.0), diag(-2.0, -1.0));
  CHECK(b.rho_stay == doctest::Approx(0.5));
  CHECK(b.rho_leave == doctest::Approx(1.0));
  // Only nu_1 < 0: leave pairs it with lambda_n.
  const StepBounds c = step_bounds(diag(1.0, 4.0), diag(-2.0, 3.0));
  CHECK(c.rho_stay == doctest::Approx(0.5));
  CHECK(c.rho_leave == doctest::Approx(2.0));
}

TEST_CASE("step bounds validate their arguments") {
  CHECK(kind_of([] { step_bounds(diag(1.0, -1.0), diag(1.0, 1.0)); }) == ErrorKind::NotSpd);
  Mat t(2, 2);
  t << 0.0, 1.0, 0.0, 0.0;
  CHECK(kind_of([&] { step_bounds(Mat::Identity(2, 2), t); }) == ErrorKind::NotSymmetric);
  CHECK(kind_of([] { step_bounds(Mat::Identity(2, 2), Mat::Identity(3, 3)); }) ==
        ErrorKind::DimMismatch);
  CHECK(kind_of([] { spd_after_step(Mat::Identity(2, 2), Mat::Identity(2, 2), -1.0); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("spd_after_step agrees with the bounds on random pairs") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const Mat p = random_spd(rng, n);
    const Mat t = random_symmetric(rng, n);
    const StepBounds b = step_bounds(p, t);
    if (b.regime == BoundRegime::AllSafe) {
      CHECK(spd_after_step(p, t, 1000.0));
      continue;
    }
    CHECK(b.rho_stay <= b.rho_leave);
    CHECK(spd_after_step(p, t, 0.999 * b.rho_stay));
    CHECK_FALSE(spd_after_step(p, t, b.rho_leave));
    CHECK_FALSE(spd_after_step(p, t, 2.0 * b.rho_leave));
  }
}

TEST_CASE("affine distance basics") {
  CHECK(affine_distance(Mat::Identity(2, 2), Mat::Identity(2, 2)) == doctest::Approx(0.0));
  // log(diag(e^2, e^-1)) has Frobenius norm sqrt(5).
  CHECK(affine_distance(Mat::Identity(2, 2), diag(std::exp(2.0), std::exp(-1.0))) ==
        doctest::Approx(std::sqrt(5.0)));
  CHECK(kind_of([] { affine_distance(Mat::Identity(2, 2), diag(1.0, -1.0)); }) == ErrorKind::NotSpd);
}

TEST_CASE("affine distance is symmetric and congruence invariant") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat p1 = random_spd(rng, 3);
    const Mat p2 = random_spd(rng, 3);
    const Mat m = random_matrix(rng, 3, 3) + 2.0 * Mat::Identity(3, 3);
    const double d = affine_distance(p1, p2);
    CHECK(affine_distance(p2, p1) == doctest::Approx(d).epsilon(1e-9));
    CHECK(affine_distance(congruence_act(m, p1), congruence_act(m, p2)) ==
          doctest::Approx(d).epsilon(1e-8));
  }
}

TEST_CASE("affine exponential stays on the cone and inverts the distance") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat p = random_spd(rng, 3);
    const Mat sigma = random_symmetric(rng, 3);
    const Mat q = affine_exp(p, sigma);
    CHECK(is_spd(q).spd);
    // The geodesic length equals the norm of the tangent vector in the metric
    // ||P^{-1/2} Sigma P^{-1/2}||_F.
    const Mat w = invsqrtm_spd(p);
    CHECK(affine_distance(p, q) == doctest::Approx((w * sigma * w).norm()).epsilon(1e-8));
  }
  const Mat p = Mat::Identity(2, 2);
  CHECK((affine_exp(p, Mat::Zero(2, 2)) - p).norm() < 1e-15);
  CHECK(kind_of([] { affine_exp(diag(1.0, -1.0), Mat::Zero(2, 2)); }) == ErrorKind::NotSpd);
}
