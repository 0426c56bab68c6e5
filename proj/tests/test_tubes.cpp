#include "aniso/errors.hpp"
#include "aniso/tubes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace aniso;

namespace {

Lagrangian profile() { return Lagrangian::angle_profile(3, 2, {1.0, 0.1}); }

Lagrangian wulff() {
  Mat q = Mat::Zero(3, 3);
  q.diagonal() << 1.0, 1.5, 4.0;
  return Lagrangian::quadratic_form(q);
}

}  // namespace

TEST(GeodesicSphere, EuclideanWulffShapePointwise) {
  const double r = 0.6;
  const Lagrangian f_lag = wulff();
  const Immersion f = geodesic_sphere(AmbientModel::euclidean(3), f_lag, r, Domain::sphere2(16, 16));
  for (std::size_t i = 0; i < f.domain().node_count(); i += 5) {
    const Vec v = f.domain().embed(f.domain().node(i));
    const Vec expected = r * (f_lag.eval(v) * v + f_lag.gradient(v));
    EXPECT_LT((f.point_at(v) - expected).norm(), 1e-14);
  }
}

TEST(GeodesicSphere, ParallelWulffSphereGrowsTheRadius) {
  const Lagrangian f_lag = wulff();
  const AmbientModel m = AmbientModel::euclidean(3);
  const Domain d = Domain::sphere2(16, 16);
  const Immersion f = geodesic_sphere(m, f_lag, 0.5, d);
  const Immersion g = geodesic_sphere(m, f_lag, 0.7, d);
  const Immersion ft = parallel_hypersurface(f, f_lag, 0.2);
  for (const Param& u : spread_nodes(d, 30)) {
    EXPECT_LT((ft.point(u) - g.point(u)).norm(), 1e-10);
  }
}

TEST(GeodesicSphere, RadiusBound) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  // r_M / (2 max |F(v)v + grad F|) = pi / 2.2 for the profile.
  EXPECT_THROW(geodesic_sphere(m, profile(), 1.5, Domain::sphere(3, 16)), RadiusBoundError);
  EXPECT_NO_THROW(geodesic_sphere(m, profile(), 1.4, Domain::sphere(3, 16)));
  EXPECT_NO_THROW(check_radius_bound(AmbientModel::hyperbolic_product(2, 2), profile(), 5.0));
}

TEST(GeodesicSphere, RejectsMismatchedLagrangian) {
  EXPECT_THROW(geodesic_sphere(AmbientModel::sphere_product(2, 2), wulff(), 0.3, Domain::sphere(3, 16)),
               UsageError);
}

class SphereSpectrum : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(SphereSpectrum, NumericMatchesClosedForm) {
  const auto [which, r] = GetParam();
  const AmbientModel m = which == 0 ? AmbientModel::sphere_product(2, 2) : AmbientModel::hyperbolic_product(2, 2);
  const Lagrangian f_lag = profile();
  const Immersion f = geodesic_sphere(m, f_lag, r, Domain::sphere(3, 16));
  for (double theta : {0.15, 0.5, 0.9, 1.3}) {
    Param u(3);
    u << theta, 0.4, 2.1;
    const SurfaceSample s = surface_sample(f, f_lag, u);
    const ClosedFormReport cf = closed_form_sphere_spectrum(m, f_lag, r, f.domain().embed(u));
    EXPECT_LT((real_spectrum(s.aniso_shape).first - cf.eigenvalues).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(cf.eigenvalues.maxCoeff(), 0.0);
    const auto found = focal_radii(m, focal_sample(s));
    std::vector<double> expected;
    for (const auto& root : cf.afr) expected.push_back(root.s);
    EXPECT_LT(hausdorff(root_values(found), expected), 1e-6);
    if (m.epsilon() < 0) {
      ASSERT_EQ(found.roots.size(), 1u);
      EXPECT_NEAR(found.roots.front().s, -r, 1e-8);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Models, SphereSpectrum,
                         ::testing::Combine(::testing::Values(0, 1), ::testing::Values(0.2, 0.4)));

TEST(GeodesicSphere, EuclideanRoundSphereFocalRadius) {
  const double r = 0.5;
  const AmbientModel m = AmbientModel::euclidean(3);
  const Lagrangian one = Lagrangian::constant(2, 1.0);
  const Immersion f = geodesic_sphere(m, one, r, Domain::sphere2(16, 16));
  const auto found = focal_radii(m, focal_sample(surface_sample(f, one, f.domain().node(40))));
  ASSERT_EQ(found.roots.size(), 1u);
  EXPECT_NEAR(found.roots.front().s, -r, 1e-9);
  EXPECT_EQ(found.roots.front().multiplicity, 2);
}

TEST(GeodesicSphere, SpectrumVariesAlongTheOrbitSpace) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const Vec a = closed_form_sphere_spectrum(m, f_lag, 0.3, f_lag.orbit_representative(0.3)).eigenvalues;
  const Vec b = closed_form_sphere_spectrum(m, f_lag, 0.3, f_lag.orbit_representative(1.2)).eigenvalues;
  EXPECT_GT((a - b).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(GeodesicSphere, IsotropicSpectrumInSphereProduct) {
  // F = 1, theta = pi/4: both roots equal 1/sqrt 2, giving -a cot(r a) on the root spaces.
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Lagrangian one = Lagrangian::constant(3, 1.0);
  const double r = 0.3;
  Vec v(4);
  v << 1.0, 0.0, 1.0, 0.0;
  v /= std::sqrt(2.0);
  const Vec eig = closed_form_sphere_spectrum(m, one, r, v).eigenvalues;
  const double a = 1.0 / std::sqrt(2.0);
  std::vector<double> expected{-1.0 / r, -a / std::tan(r * a), -a / std::tan(r * a)};
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(eig(i), expected[i], 1e-12);
}

TEST(ReflectiveTube, IsotropicTubeSpectrum) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Lagrangian one = Lagrangian::constant(3, 1.0);
  const double r = 0.4;
  Vec v = Vec::Zero(4);
  v(2) = 1.0;
  const Vec eig = closed_form_tube_spectrum(m, 0, one, r, v).eigenvalues;
  // -cot r in the normal sphere direction, 0 twice along the flat base directions.
  std::vector<double> expected{-1.0 / std::tan(r), 0.0, 0.0};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(eig(i), expected[i], 1e-12);
  const Immersion tube = build_tube(m, one, TubeSpec{BaseKind::Factor, 0, r}, 16);
  for (const Param& u : spread_nodes(tube.domain(), 10)) {
    EXPECT_LT((real_spectrum(surface_sample(tube, one, u).aniso_shape).first - eig).norm(), 1e-6);
  }
}

TEST(ReflectiveTube, EquifocalAndIsoparametric) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const double r = 0.4;
  const Immersion tube = build_tube(m, f_lag, TubeSpec{BaseKind::Factor, 1, r}, 16);
  const auto nodes = spread_nodes(tube.domain(), 20);
  EXPECT_TRUE(check_equifocal(tube, f_lag, nodes).pass);
  EXPECT_TRUE(check_isoparametric(tube, f_lag, default_t_grid(r), nodes).pass);
  EXPECT_TRUE(check_constant_principal_curvatures(tube, f_lag, nodes).pass);
  EXPECT_TRUE(check_embedded(tube).pass);
}

TEST(GeodesicSphere, AnisotropicSphereIsNeitherEquifocalNorIsoparametric) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const Immersion f = geodesic_sphere(m, f_lag, 0.3, Domain::sphere(3, 12));
  const auto nodes = spread_nodes(f.domain(), 20);
  EXPECT_FALSE(check_equifocal(f, f_lag, nodes).pass);
  EXPECT_FALSE(check_isoparametric(f, f_lag, default_t_grid(0.3), nodes).pass);
}

TEST(Reconstruction, TubeAndSphereFromTheirFocalSets) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const Immersion tube = build_tube(m, f_lag, TubeSpec{BaseKind::Factor, 0, 0.4}, 16);
  const auto a = reconstruct_from_focal(tube, f_lag, -0.4, spread_nodes(tube.domain(), 30));
  EXPECT_EQ(a.collapse_rank, 2);
  EXPECT_LT(a.max_distance, 1e-7);
  const Immersion sphere = geodesic_sphere(m, f_lag, 0.3, Domain::sphere(3, 16));
  const auto b = reconstruct_from_focal(sphere, f_lag, -0.3, spread_nodes(sphere.domain(), 30));
  EXPECT_EQ(b.collapse_rank, 0);
  EXPECT_LT(b.max_distance, 1e-7);
  EXPECT_THROW(reconstruct_from_focal(sphere, f_lag, -0.1, spread_nodes(sphere.domain(), 10)),
               NotFocalError);
}

TEST(Tubes, NodeAndOffsetHelpers) {
  const Domain d = Domain::sphere(3, 16);
  const auto a = spread_nodes(d, 25), b = spread_nodes(d, 25);
  ASSERT_EQ(a.size(), 25u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  const auto t = default_t_grid(0.4);
  ASSERT_EQ(t.size(), 7u);
  for (double x : t) EXPECT_LE(std::abs(x), 0.2 + 1e-15);
}

TEST(Tubes, TubeNeedsSphereProduct) {
  EXPECT_THROW(build_tube(AmbientModel::hyperbolic_product(2, 2), profile(),
                          TubeSpec{BaseKind::Factor, 0, 0.3}, 16),
               UsageError);
}
