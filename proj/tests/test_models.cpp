#include <cmath>

#include "doctest.h"
#include "spdflow/integrators.hpp"
#include "spdflow/models.hpp"
#include "test_util.hpp"

using namespace spdflow;
using spdflow::testing::random_matrix;
using spdflow::testing::random_spd;

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

double consistency_defect(const Model& m, const Mat& p, double t, const Vec& aux) {
  const Mat xi = m.xi(p, t, aux);
  return (xi * p + p * xi.transpose() - m.tangent(p, t, aux)).norm() / p.norm();
}

}  // namespace

TEST_CASE("linear model") {
  const Mat p = Mat::Identity(2, 2) * 3.0;
  CHECK(linear_model(Mat::Zero(2, 2)).tangent(p, 0.0, Vec()).norm() == 0.0);
  const Model m = linear_model(-Mat::Identity(2, 2));
  CHECK((m.tangent(p, 0.0, Vec()) + 2.0 * p).norm() == 0.0);
  CHECK((m.xi(p, 1.0, Vec()) + Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("Ornstein-Uhlenbeck model") {
  std::mt19937_64 rng(41);
  const Mat a = random_matrix(rng, 3, 3);
  const Mat p = random_spd(rng, 3);
  const Model no_noise = ou_model(a, Mat::Zero(3, 3));
  CHECK((no_noise.tangent(p, 0.0, Vec()) - linear_model(a).tangent(p, 0.0, Vec())).norm() < 1e-14);
  const Model pure = ou_model(Mat::Zero(2, 2), Mat::Identity(2, 2));
  CHECK((pure.tangent(Mat::Identity(2, 2), 0.0, Vec()) - Mat::Identity(2, 2)).norm() == 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Model m = ou_model(random_matrix(rng, 3, 3), random_matrix(rng, 3, 3));
    CHECK(consistency_defect(m, random_spd(rng, 3), 0.0, Vec()) <= 1e-10);
  }
}

TEST_CASE("geometric Brownian motion model") {
  std::mt19937_64 rng(42);
  const Mat a = random_matrix(rng, 2, 2);
  const Mat p = random_spd(rng, 2);
  const Vec m0 = Vec::Zero(2);
  const Model zero_noise = gbm_model(a, Mat::Zero(2, 2), Vec::Ones(2));
  CHECK((zero_noise.tangent(p, 0.0, Vec::Ones(2)) - linear_model(a).tangent(p, 0.0, Vec())).norm() <
        1e-14);
  const Model m = gbm_model(a, random_matrix(rng, 2, 2), m0);
  CHECK(m.aux_evolve(0.0, 1.5, m0).norm() == 0.0);

  // Exact mean evolution composes and matches expm(t theta) m.
  const Mat b = random_matrix(rng, 2, 2);
  const Vec mean(Vec::Ones(2));
  const Model g = gbm_model(a, b, mean);
  const Mat theta = a + 0.5 * b * b;
  const Vec direct = g.aux_evolve(0.0, 0.7, mean);
  CHECK((direct - expm(0.7 * theta) * mean).norm() < 1e-12);
  CHECK((g.aux_evolve(0.3, 0.7, g.aux_evolve(0.0, 0.3, mean)) - direct).norm() < 1e-12);

  for (int trial = 0; trial < 100; ++trial) {
    const Vec aux = random_matrix(rng, 3, 1);
    const Model r = gbm_model(random_matrix(rng, 3, 3), random_matrix(rng, 3, 3), aux);
    CHECK(consistency_defect(r, random_spd(rng, 3), 0.0, aux) <= 1e-10);
  }
  CHECK(kind_of([] { gbm_model(Mat::Zero(2, 2), Mat::Zero(2, 2), Vec::Zero(3)); }) ==
        ErrorKind::DimMismatch);
}

TEST_CASE("Riccati model") {
  std::mt19937_64 rng(43);
  const Mat a = random_matrix(rng, 2, 2);
  const Mat p = random_spd(rng, 2);
  const Model lin = riccati_model(a, Mat::Zero(2, 2), Mat::Zero(2, 2), Mat::Identity(2, 2));
  CHECK((lin.tangent(p, 0.0, Vec()) - linear_model(-a).tangent(p, 0.0, Vec())).norm() < 1e-14);

  for (int trial = 0; trial < 100; ++trial) {
    const Mat g = random_matrix(rng, 3, 3);
    const Model m = riccati_model(random_matrix(rng, 3, 3), random_matrix(rng, 3, 3),
                                  g * g.transpose(), random_spd(rng, 3));
    const Mat q = random_spd(rng, 3);
    CHECK(consistency_defect(m, q, 0.0, Vec()) <= 1e-10);
    const Mat via_siegel = siegel_algebra(m.siegel_coeffs(q, 0.0, Vec()), q);
    CHECK((via_siegel - m.tangent(q, 0.0, Vec())).norm() <= 1e-8);
  }

  CHECK(kind_of([&] { riccati_model(a, a, Mat::Identity(2, 2), -Mat::Identity(2, 2)); }) ==
        ErrorKind::NotSpd);
  CHECK(kind_of([&] { riccati_model(a, a, -Mat::Identity(2, 2), Mat::Identity(2, 2)); }) ==
        ErrorKind::NotSpd);
}

TEST_CASE("scalar Riccati against a brute-force integration") {
  // dp/dt = -(2 a p - p^2 b^2 / r + q), integrated with many tiny RK4 steps on
  // the scalar equation and compared with the matrix code path.
  const double a = -0.3, b = 0.8, q = 0.5, r = 2.0, p0 = 1.2, t1 = 1.0;
  auto f = [&](double p) { return -(2.0 * a * p - p * p * b * b / r + q); };
  double p = p0;
  const int n = 20000;
  const double h = t1 / n;
  for (int i = 0; i < n; ++i) {
    const double k1 = f(p), k2 = f(p + 0.5 * h * k1), k3 = f(p + 0.5 * h * k2), k4 = f(p + h * k3);
    p += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  auto one = [](double x) { return Mat::Constant(1, 1, x); };
  const Model m = riccati_model(one(a), one(b), one(q), one(r));
  const auto stepper = make_stepper(StepperKind::Rkmk4);
  const Trajectory traj = integrate(*stepper, m, one(p0), linspace(0.0, t1, 201));
  CHECK(traj.points.back()(0, 0) == doctest::Approx(p).epsilon(1e-9));
  const auto symp = make_stepper(StepperKind::Rkmk4, ActionKind::Symplectic);
  const Trajectory via_siegel = integrate(*symp, m, one(p0), linspace(0.0, t1, 201));
  CHECK(via_siegel.points.back()(0, 0) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("models report singular points") {
  Mat singular = Mat::Zero(2, 2);
  singular(0, 0) = 1.0;
  const Model ou = ou_model(Mat::Zero(2, 2), Mat::Identity(2, 2));
  CHECK(kind_of([&] { ou.xi(singular, 0.0, Vec()); }) == ErrorKind::ModelEvalFailure);
  const Model gbm = gbm_model(Mat::Zero(2, 2), Mat::Identity(2, 2), Vec::Zero(2));
  CHECK(kind_of([&] { gbm.xi(singular, 0.0, Vec::Zero(2)); }) == ErrorKind::ModelEvalFailure);
}

TEST_CASE("oscillating model") {
  std::mt19937_64 rng(44);
  const Mat a = random_matrix(rng, 3, 3);
  const Mat c = random_matrix(rng, 3, 3);
  const Model m = oscillating_model(a, c);
  const Mat p = random_spd(rng, 3);
  CHECK((m.xi(p, 0.0, Vec()) - a).norm() == 0.0);
  CHECK((m.xi(p, 1.0, Vec()) - (a + std::sin(1.0) * c)).norm() < 1e-15);
  CHECK(consistency_defect(m, p, 0.4, Vec()) <= 1e-10);
}

TEST_CASE("case study parameters") {
  for (CaseStudy which : {CaseStudy::One, CaseStudy::Two}) {
    for (bool swap : {false, true}) {
      const CaseStudyParams c = make_case_study(which, swap);
      CHECK((c.a * c.b - c.b * c.a).norm() <= 1e-8);
      const Mat theta = c.a + 0.5 * c.b * c.b;
      CHECK(sym_eig(symmetrize(theta)).values.maxCoeff() < 0.0);
      CHECK(c.m0.norm() == 0.0);
      CHECK(is_spd(c.p0).spd);
      CHECK(c.b(0, 0) == -0.4);
      CHECK(c.p0(0, 1) == -0.0716);
    }
  }
  const CaseStudyParams two = make_case_study(CaseStudy::Two);
  CHECK(two.step() == doctest::Approx(0.15));
  CHECK(two.points == 11);
  const CaseStudyParams one = make_case_study(CaseStudy::One);
  CHECK(one.t1 == 2.0);
  CHECK(one.points == 30);

  // A shares B's eigenvectors: O^T A O is diagonal with the chosen spectrum.
  const EigenSym eb = sym_eig(one.b);
  const Mat d = eb.vectors.transpose() * one.a * eb.vectors;
  CHECK(std::abs(d(0, 1)) < 1e-12);
  CHECK(d(0, 0) == doctest::Approx(-10.0));
  CHECK(d(1, 1) == doctest::Approx(-2.0));
}

TEST_CASE("case-study reference trace decreases toward zero") {
  for (CaseStudy which : {CaseStudy::One, CaseStudy::Two}) {
    const CaseStudyParams c = make_case_study(which);
    const Trajectory ref =
        reference_trajectory(case_study_model(c), c.p0, linspace(c.t0, c.t1, c.points), 512);
    for (std::size_t i = 1; i < ref.size(); ++i) {
      CHECK(ref.points[i].trace() < ref.points[i - 1].trace());
    }
    CHECK(ref.all_spd());
  }
}
