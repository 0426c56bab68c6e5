#include "aniso/errors.hpp"
#include "aniso/hypersurface.hpp"
#include "aniso/tubes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace aniso;

namespace {

Lagrangian wulff() {
  Mat q = Mat::Zero(3, 3);
  q.diagonal() << 1.0, 1.5, 4.0;
  return Lagrangian::quadratic_form(q);
}

double worst_over(const std::vector<SurfaceSample>& samples,
                  const std::function<double(const SurfaceSample&)>& fn) {
  double w = 0.0;
  for (const auto& s : samples) w = std::max(w, fn(s));
  return w;
}

}  // namespace

TEST(Domain, QuadratureWeights) {
  const Domain torus = Domain::torus2(16, 24);
  double sum = 0.0;
  for (std::size_t i = 0; i < torus.node_count(); ++i) sum += torus.weight(i);
  EXPECT_NEAR(sum, 4 * kPi * kPi, 1e-12);
  EXPECT_EQ(torus.node_count(), 16u * 24u);
  EXPECT_EQ(Domain::sphere(3, 16).dim(), 3);
  EXPECT_THROW(Domain::sphere(4, 16), UsageError);
}

TEST(Domain, EmbeddingIsOnTheManifold) {
  for (const Domain& d : {Domain::sphere2(8, 8), Domain::sphere3(6, 6, 6), Domain::torus2(8, 8),
                          Domain::sphere2_circle(6, 6, 6)}) {
    for (std::size_t i = 0; i < d.node_count(); i += 7) {
      const Vec y = d.embed(d.node(i));
      EXPECT_LT((d.project_point(y) - y).norm(), 1e-14);
    }
  }
}

TEST(LocalChart, CentreAndOrthonormalJacobian) {
  const Domain d = Domain::sphere2_circle(6, 6, 6);
  const Vec y = d.embed(d.node(17));
  const LocalChart chart = LocalChart::around(d, y);
  const Vec zero = Vec::Zero(d.dim());
  EXPECT_LT((chart.at(d, zero) - y).norm(), 1e-15);
  const Mat j = chart.jacobian(d, zero);
  EXPECT_LT((j.transpose() * j - Mat::Identity(d.dim(), d.dim())).norm(), 1e-8);
}

TEST(Stencil, DerivativeOfQuadraticIsExact) {
  const double h = 1e-2;
  Vec s = Vec::Zero(2);
  s << 0.3, -0.2;
  const auto pts = stencil_points(s, h);
  std::vector<double> values;
  for (const Vec& p : pts) values.push_back(p(0) * p(0) + 3 * p(0) * p(1) - p(1));
  EXPECT_NEAR(stencil_derivative(values, 0, h), 2 * 0.3 + 3 * -0.2, 1e-10);
  EXPECT_NEAR(stencil_derivative(values, 1, h), 3 * 0.3 - 1, 1e-10);
}

TEST(Hypersurface, RoundSphereShapeOperator) {
  const double r = 0.7;
  const Lagrangian one = Lagrangian::constant(2, 1.0);
  const Immersion f = geodesic_sphere(AmbientModel::euclidean(3), one, r, Domain::sphere2(16, 16));
  const auto samples = sample_all(f, one);
  const Mat target = -(1.0 / r) * Mat::Identity(2, 2);
  EXPECT_LT(worst_over(samples, [&](const auto& s) { return (s.shape - target).norm(); }), 1e-7);
  EXPECT_LT(worst_over(samples, [&](const auto& s) { return std::abs(s.mean + 2 / r); }), 1e-7);
  // Outward normal and nu = xi in flat space.
  EXPECT_LT(worst_over(samples, [&](const auto& s) { return (s.xi - s.point / r).norm(); }), 1e-10);
  EXPECT_LT(worst_over(samples, [&](const auto& s) { return (s.nu - s.xi).norm(); }), 1e-14);
}

TEST(Hypersurface, ConstantLagrangianScalesTheShapeOperator) {
  const Lagrangian c = Lagrangian::constant(3, 2.5);
  const Immersion f =
      geodesic_sphere(AmbientModel::sphere_product(2, 2), c, 0.3, Domain::sphere(3, 16));
  for (const Param& u : spread_nodes(f.domain(), 10)) {
    const SurfaceSample s = surface_sample(f, c, u);
    EXPECT_LT(metric_operator_norm(s.metric, s.aniso_shape - 2.5 * s.shape), 1e-8);
    EXPECT_NEAR(s.aniso_mean, 2.5 * s.mean, 1e-8);
    EXPECT_NEAR(s.aniso_mean_div, s.aniso_mean, 1e-6);
  }
}

TEST(Hypersurface, WulffSphereIsUmbilic) {
  const double r = 0.5;
  const Lagrangian f_lag = wulff();
  const Immersion f = geodesic_sphere(AmbientModel::euclidean(3), f_lag, r, Domain::sphere2(24, 24));
  const auto samples = sample_all(f, f_lag);
  const Mat target = -(1.0 / r) * Mat::Identity(2, 2);
  EXPECT_LT(worst_over(samples, [&](const auto& s) { return metric_operator_norm(s.metric, s.aniso_shape - target); }), 1e-6);
  EXPECT_LT(worst_over(samples, [&](const auto& s) { return std::abs(s.aniso_mean + 2 / r); }), 1e-6);
  // Two routes to H_F: the trace of A^F and F H - div W_T.
  EXPECT_LT(worst_over(samples, [&](const auto& s) { return std::abs(s.aniso_mean - s.aniso_mean_div); }), 1e-5);
}

TEST(Hypersurface, TorusPrincipalCurvatures) {
  const double big = 1.0, small = 0.4;
  const Lagrangian one = Lagrangian::constant(2, 1.0);
  const Immersion f = euclidean_torus(big, small, Domain::torus2(24, 24));
  for (const auto& s : sample_all(f, one)) {
    const double rho = std::hypot(s.point(0), s.point(1));
    const double cosv = (rho - big) / small;
    Vec expected(2);
    expected << -1.0 / small, -cosv / rho;
    std::sort(expected.data(), expected.data() + 2);
    EXPECT_LT((real_spectrum(s.shape).first - expected).norm(), 1e-7);
  }
}

TEST(Hypersurface, EllipsoidGaussCurvature) {
  const double a = 1.0, b = 0.9, c = 0.8;
  const Immersion f = euclidean_ellipsoid({a, b, c}, Domain::sphere2(16, 32));
  const Lagrangian one = Lagrangian::constant(2, 1.0);
  for (const auto& s : sample_all(f, one)) {
    const Vec& x = s.point;
    const double q = x(0) * x(0) / std::pow(a, 4) + x(1) * x(1) / std::pow(b, 4) +
                     x(2) * x(2) / std::pow(c, 4);
    EXPECT_NEAR(s.shape.determinant(), 1.0 / (a * a * b * b * c * c * q * q), 1e-6);
  }
}

TEST(Hypersurface, GaussImageOfGeodesicSpheres) {
  const Lagrangian f_lag = Lagrangian::angle_profile(3, 2, {1.0, 0.1});
  for (const AmbientModel& m : {AmbientModel::sphere_product(2, 2), AmbientModel::hyperbolic_product(2, 2)}) {
    const Immersion f = geodesic_sphere(m, f_lag, 0.3, Domain::sphere(3, 16));
    for (const Param& u : spread_nodes(f.domain(), 40)) {
      const Vec v = f.domain().embed(u);
      const LocalFrame lf = local_frame_at(f, v);
      EXPECT_LT((gauss_image(m, lf.point, lf.normal) - v).norm(), 1e-8);
    }
  }
}

TEST(Hypersurface, RadialGraphWithoutBumpIsTheGeodesicSphere) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Domain d = Domain::sphere(3, 16);
  const Immersion g = graph_over_sphere(m, 0.4, 0.0, d);
  const Immersion s = geodesic_sphere(m, Lagrangian::constant(3, 1.0), 0.4, d);
  for (std::size_t i = 0; i < d.node_count(); i += 97) {
    EXPECT_LT((g.point(d.node(i)) - s.point(d.node(i))).norm(), 1e-14);
  }
}

TEST(Hypersurface, MetricHelpers) {
  Mat g(2, 2);
  g << 2.0, 0.5, 0.5, 1.0;
  Mat zero = Mat::Zero(2, 2);
  EXPECT_EQ(metric_operator_norm(g, zero), 0.0);
  // A g-self-adjoint operator has zero asymmetry.
  Mat sym(2, 2);
  sym << 1.0, 0.3, 0.3, -2.0;
  const Mat op = g.inverse() * sym;
  EXPECT_LT(metric_asymmetry(g, op), 1e-14);
  const auto [eig, imag] = real_spectrum(op);
  EXPECT_LT(imag, 1e-14);
  EXPECT_LE(eig(0), eig(1));
}
