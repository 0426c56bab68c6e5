#include "aniso/errors.hpp"
#include "aniso/lagrangian.hpp"
#include "aniso/symspace.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aniso;
using testing_support::unit;

namespace {

Lagrangian wulff() {
  Mat q = Mat::Zero(3, 3);
  q.diagonal() << 1.0, 1.5, 4.0;
  return Lagrangian::quadratic_form(q);
}

// d/dt F(sphere_exp(v, t e)) at t = 0 by a fourth-order central difference.
double directional(const Lagrangian& f, const Vec& v, const Vec& e, double h = 1e-3) {
  auto at = [&](double t) { return f.eval(sphere_exp(v, t * e)); };
  return (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
}

double second(const Lagrangian& f, const Vec& v, const Vec& e, double h = 1e-3) {
  auto at = [&](double t) { return f.eval(sphere_exp(v, t * e)); };
  return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
}

}  // namespace

TEST(Lagrangian, ConstantHasFlatDerivatives) {
  const Lagrangian f = Lagrangian::constant(3, 2.5);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vec v = unit(4, rng);
    EXPECT_DOUBLE_EQ(f.eval(v), 2.5);
    EXPECT_LT(f.gradient(v).norm(), 1e-14);
    EXPECT_LT(f.hessian(v).norm(), 1e-14);
  }
}

TEST(Lagrangian, RejectsInvalidParameters) {
  EXPECT_THROW(Lagrangian::constant(2, 0.0), UsageError);
  Mat q = Mat::Identity(3, 3);
  q(0, 0) = -1.0;
  EXPECT_THROW(Lagrangian::quadratic_form(q), UsageError);
  q = Mat::Identity(3, 3);
  q(0, 1) = 0.5;
  EXPECT_THROW(Lagrangian::quadratic_form(q), UsageError);
  EXPECT_THROW(Lagrangian::angle_profile(3, 4, {1.0}), UsageError);
  EXPECT_THROW(Lagrangian::angle_profile(3, 2, {}), UsageError);
}

TEST(Lagrangian, QuadraticFormMatchesDefinition) {
  const Lagrangian f = wulff();
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Vec v = unit(3, rng);
    const double expected = std::sqrt(v(0) * v(0) + 1.5 * v(1) * v(1) + 4.0 * v(2) * v(2));
    EXPECT_NEAR(f.eval(v), expected, 1e-14);
  }
}

// Gradient and Hessian against differences along great circles, for every family.
class DerivativeOracle : public ::testing::TestWithParam<int> {};

TEST_P(DerivativeOracle, GradientAndHessianMatchGreatCircleDifferences) {
  const std::vector<Lagrangian> fs{wulff(), Lagrangian::angle_profile(3, 2, {1.0, 0.1}),
                                   Lagrangian::angle_profile(3, 1, {1.0, 0.05, -0.02})};
  const Lagrangian& f = fs[GetParam()];
  std::mt19937_64 rng(3 + GetParam());
  const int dim = f.ambient_dim();
  for (int k = 0; k < 25; ++k) {
    const Vec v = unit(dim, rng);
    const Mat basis = sphere_tangent_basis(v);
    const Vec g = f.gradient(v);
    EXPECT_LT(std::abs(g.dot(v)), 1e-12);
    const Mat hess = f.hessian(v);
    for (int i = 0; i < basis.cols(); ++i) {
      const Vec e = basis.col(i);
      EXPECT_NEAR(g.dot(e), directional(f, v, e), 2e-8);
      // Along a great circle the covariant Hessian is the plain second derivative.
      EXPECT_NEAR(e.dot(hess * e), second(f, v, e), 2e-5);
    }
    EXPECT_LT((hess - hess.transpose()).norm(), 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Families, DerivativeOracle, ::testing::Values(0, 1, 2));

TEST(Lagrangian, AngleProfileDependsOnlyOnTheta) {
  const Lagrangian f = Lagrangian::angle_profile(3, 2, {1.0, 0.1});
  for (double theta : {0.0, 0.3, 0.7, 1.2, kPi / 2}) {
    EXPECT_NEAR(f.profile(theta), 1.0 + 0.1 * std::cos(2 * theta), 1e-14);
    const Vec v = f.orbit_representative(theta);
    EXPECT_NEAR(f.orbit_angle(v), theta, 1e-12);
    EXPECT_NEAR(f.eval(v), f.profile(theta), 1e-14);
  }
}

TEST(Lagrangian, HolonomyInvariance) {
  std::mt19937_64 rng(4);
  const auto s2s2 = AmbientModel::sphere_product(2, 2);
  const Lagrangian profile = Lagrangian::angle_profile(3, 2, {1.0, 0.1});
  const auto eucl = AmbientModel::euclidean(3);
  for (int k = 0; k < 10; ++k) {
    EXPECT_LT(check_holonomy_invariance(profile, s2s2, unit(4, rng), 16, rng), 1e-12);
    EXPECT_LT(check_holonomy_invariance(wulff(), eucl, unit(3, rng), 16, rng), 1e-15);
  }
  // A generic quadratic form is not invariant under the rotations of the product factors.
  Mat q = Mat::Identity(4, 4);
  q(0, 0) = 2.0;
  const Lagrangian generic = Lagrangian::quadratic_form(q);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k)
    worst = std::max(worst, check_holonomy_invariance(generic, s2s2, unit(4, rng), 16, rng));
  EXPECT_GT(worst, 1e-2);
}

TEST(Lagrangian, Convexity) {
  std::mt19937_64 rng(5);
  const Lagrangian mild = Lagrangian::angle_profile(3, 2, {1.0, 0.1});
  EXPECT_TRUE(check_convexity(mild, convexity_samples(mild, 400, rng)).pass);
  const Lagrangian quad = wulff();
  EXPECT_TRUE(check_convexity(quad, convexity_samples(quad, 400, rng)).pass);
  // phi + phi'' = 1 - 3 c cos(2 theta) changes sign for c > 1/3.
  const Lagrangian steep = Lagrangian::angle_profile(3, 2, {1.0, 0.5});
  const auto report = check_convexity(steep, convexity_samples(steep, 400, rng));
  EXPECT_FALSE(report.pass);
  EXPECT_LT(report.min_eigenvalue, 0.0);
}

TEST(Lagrangian, IsotropicConvexityEigenvalueIsTheConstant) {
  std::mt19937_64 rng(6);
  const Lagrangian f = Lagrangian::constant(2, 1.7);
  EXPECT_NEAR(check_convexity(f, random_sphere_samples(3, 50, rng)).min_eigenvalue, 1.7, 1e-12);
}

TEST(Lagrangian, WulffMapInverse) {
  std::mt19937_64 rng(7);
  for (const Lagrangian& f : {wulff(), Lagrangian::angle_profile(3, 2, {1.0, 0.1})}) {
    for (int k = 0; k < 20; ++k) {
      const Vec v = unit(f.ambient_dim(), rng);
      const Vec w = f.eval(v) * v + f.gradient(v);
      EXPECT_LT((wulff_normal(f, w) - v).norm(), 1e-8);
    }
  }
}

TEST(Lagrangian, MaxWulffRadius) {
  EXPECT_NEAR(max_wulff_radius(Lagrangian::constant(2, 1.3)), 1.3, 1e-12);
  // For sqrt(v^T Q v) the Wulff map is Qv / F(v), largest along the top eigenvector.
  EXPECT_NEAR(max_wulff_radius(wulff()), 2.0, 1e-6);
}
