#include "aniso/errors.hpp"
#include "aniso/tubes.hpp"
#include "aniso/variational.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace aniso;

namespace {

Lagrangian wulff() {
  Mat q = Mat::Zero(3, 3);
  q.diagonal() << 1.0, 1.5, 4.0;
  return Lagrangian::quadratic_form(q);
}

}  // namespace

TEST(Integration, AreasOfRoundSphereAndTorus) {
  const AmbientModel m = AmbientModel::euclidean(3);
  const Immersion sphere = geodesic_sphere(m, Lagrangian::constant(2, 1.0), 0.7, Domain::sphere2(24, 24));
  EXPECT_NEAR(area(sphere), 4 * kPi * 0.49, 1e-9);
  const Immersion torus = euclidean_torus(1.0, 0.4, Domain::torus2(32, 32));
  EXPECT_NEAR(area(torus), 4 * kPi * kPi * 0.4, 1e-9);
  // Volume of a geodesic sphere in S^2 x S^2 does not depend on the resolution.
  const Immersion s3 = geodesic_sphere(AmbientModel::sphere_product(2, 2), Lagrangian::constant(3, 1.0), 0.3,
                                       Domain::sphere(3, 16));
  EXPECT_NEAR(area(s3), area(s3.with_domain(Domain::sphere(3, 24))), 1e-8);
}

TEST(Integration, EnergyOfConstantLagrangianIsScaledArea) {
  const Immersion torus = euclidean_torus(1.0, 0.4, Domain::torus2(24, 24));
  EXPECT_NEAR(energy(torus, Lagrangian::constant(2, 3.0)), 3.0 * area(torus), 1e-10);
}

TEST(Integration, MeanZeroVariation) {
  std::mt19937_64 rng(1);
  const Immersion f = euclidean_ellipsoid({1.0, 0.9, 0.8}, Domain::sphere2(16, 32));
  const Variation v = random_variation(f, rng, true);
  EXPECT_LT(std::abs(integrate(f, v.psi)), 1e-12);
  const Variation w = mean_zero(f, random_variation(f, rng, false));
  EXPECT_LT(std::abs(integrate(f, w.psi)), 1e-12);
}

TEST(PolynomialField, FitReproducesPolynomials) {
  const Domain d = Domain::sphere2(12, 12);
  auto target = [](const Vec& y) {
    Vec v(2);
    v << 1 + y(0) * y(1) - 2 * y(2), y(0) * y(0) * y(2);
    return v;
  };
  std::vector<Vec> values;
  for (std::size_t i = 0; i < d.node_count(); ++i) values.push_back(target(d.embed(d.node(i))));
  const PolynomialField p = PolynomialField::fit(d, values, 3);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 10; ++k) {
    Vec y(3);
    y << normal(rng), normal(rng), normal(rng);
    y.normalize();
    EXPECT_LT((p.eval(y) - target(y)).norm(), 1e-10);
  }
}

TEST(FirstVariation, TranslationIsFree) {
  // Energy of any F is invariant under translations of a closed surface in R^3.
  const double r = 0.5;
  const Lagrangian f_lag = wulff();
  const Immersion f = geodesic_sphere(AmbientModel::euclidean(3), Lagrangian::constant(2, 1.0), r,
                                      Domain::sphere2(24, 24));
  Vec c(3);
  c << 0.3, -0.2, 0.5;
  Variation translate;
  translate.psi = [&](const Vec& y) { return c.dot(local_frame_at(f, y).normal); };
  translate.tangent = [&](const Vec& y) { return Vec((c - c.dot(y) * y) / r); };
  const auto rep = verify_first_variation(f, f_lag, {translate}).front();
  EXPECT_LT(std::abs(rep.fd_derivative), 1e-6);
  EXPECT_LT(std::abs(rep.formula_value), 1e-6);
}

TEST(FirstVariation, RandomVariationsOnTorus) {
  std::mt19937_64 rng(3);
  const Immersion torus = euclidean_torus(1.0, 0.4, Domain::torus2(32, 32));
  std::vector<Variation> vs;
  for (int k = 0; k < 3; ++k) vs.push_back(random_variation(torus, rng, false));
  for (const auto& rep : verify_first_variation(torus, wulff(), vs)) {
    EXPECT_LT(rep.rel_error, 1e-6);
    EXPECT_GT(std::abs(rep.formula_value), 1e-3);
  }
}

TEST(FirstVariation, NormalVariationOnAnisotropicSphere) {
  std::mt19937_64 rng(4);
  const Lagrangian f_lag = Lagrangian::angle_profile(3, 2, {1.0, 0.1});
  const Immersion f = geodesic_sphere(AmbientModel::hyperbolic_product(2, 2), f_lag, 0.3, Domain::sphere(3, 16));
  const auto rep = verify_first_variation(f, f_lag, {random_variation(f, rng, false, false)}).front();
  EXPECT_LT(rep.rel_error, 1e-6);
}

TEST(CriticalPoint, WulffSphereIsVolumeConstrainedCritical) {
  std::mt19937_64 rng(5);
  const Lagrangian f_lag = wulff();
  const Immersion f = geodesic_sphere(AmbientModel::euclidean(3), f_lag, 0.5, Domain::sphere2(32, 32));
  const auto rep = verify_critical_point(f, f_lag, CriticalMode::VolumePreserving, 3, rng);
  EXPECT_TRUE(rep.critical_by_derivative);
  EXPECT_TRUE(rep.critical_by_curvature);
  EXPECT_TRUE(rep.consistent);
  for (double d : rep.derivatives) EXPECT_LT(std::abs(d), 1e-6);
}

TEST(CriticalPoint, SphereIsNotFreeCritical) {
  std::mt19937_64 rng(6);
  const Lagrangian one = Lagrangian::constant(2, 1.0);
  const Immersion f = geodesic_sphere(AmbientModel::euclidean(3), one, 0.5, Domain::sphere2(16, 16));
  const auto rep = verify_critical_point(f, one, CriticalMode::Free, 2, rng);
  EXPECT_FALSE(rep.critical_by_derivative);
  EXPECT_FALSE(rep.critical_by_curvature);
  EXPECT_TRUE(rep.consistent);
}

TEST(CriticalPoint, AnisotropicSphereInProductIsNotCritical) {
  std::mt19937_64 rng(7);
  const Lagrangian f_lag = Lagrangian::angle_profile(3, 2, {1.0, 0.1});
  const Immersion f = geodesic_sphere(AmbientModel::sphere_product(2, 2), f_lag, 0.3, Domain::sphere(3, 16));
  const auto rep = verify_critical_point(f, f_lag, CriticalMode::VolumePreserving, 2, rng);
  EXPECT_FALSE(rep.critical_by_derivative);
  EXPECT_TRUE(rep.consistent);
}

TEST(Flow, WulffSphereIsStationaryUnderVolumePreservingFlow) {
  const Lagrangian f_lag = wulff();
  const Immersion f = geodesic_sphere(AmbientModel::euclidean(3), f_lag, 0.5, Domain::sphere2(16, 16));
  FlowOptions options;
  options.steps = 5;
  options.mode = CriticalMode::VolumePreserving;
  const auto rep = gradient_flow(f, f_lag, options);
  const double e0 = rep.trajectory.front().energy;
  for (const auto& s : rep.trajectory) EXPECT_NEAR(s.energy, e0, 1e-8 * e0);
}

TEST(Flow, EllipsoidEnergyDecreasesMonotonically) {
  const Lagrangian one = Lagrangian::constant(2, 1.0);
  const Immersion f = euclidean_ellipsoid({1.0, 0.9, 0.8}, Domain::sphere2(12, 24));
  FlowOptions options;
  options.steps = 200;
  options.dt = 2e-4;
  const auto rep = gradient_flow(f, one, options);
  ASSERT_EQ(rep.trajectory.size(), 201u);
  EXPECT_TRUE(rep.monotone);
  for (std::size_t i = 1; i < rep.trajectory.size(); ++i) {
    EXPECT_LE(rep.trajectory[i].energy, rep.trajectory[i - 1].energy);
  }
  EXPECT_LT(rep.trajectory.back().energy, rep.trajectory.front().energy);
}
