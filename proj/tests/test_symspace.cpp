#include "aniso/errors.hpp"
#include "aniso/oracles.hpp"
#include "aniso/symspace.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aniso;
using testing_support::point;
using testing_support::tangent;

class ModelTest : public ::testing::TestWithParam<int> {
 protected:
  AmbientModel model() const { return testing_support::models()[GetParam()]; }
};

TEST_P(ModelTest, ExpLogRoundTrip) {
  const AmbientModel m = model();
  std::mt19937_64 rng(10 + GetParam());
  for (int k = 0; k < 40; ++k) {
    const Vec x = point(m, rng);
    Vec v = tangent(m, x, rng);
    v *= 0.8 / m.norm(v);
    const Vec y = m.exp(x, v);
    EXPECT_LT(m.constraint_residual(y), 1e-12);
    EXPECT_LT((m.log(x, y) - v).norm(), 1e-10);
    EXPECT_NEAR(m.distance(x, y), 0.8, 1e-10);
    EXPECT_NEAR(m.distance(y, x), 0.8, 1e-10);
  }
}

TEST_P(ModelTest, TransportIsAnIsometry) {
  const AmbientModel m = model();
  std::mt19937_64 rng(20 + GetParam());
  for (int k = 0; k < 40; ++k) {
    const Vec x = point(m, rng);
    const Vec y = point(m, rng);
    const Vec a = tangent(m, x, rng), b = tangent(m, x, rng);
    const Vec ta = m.transport(x, y, a), tb = m.transport(x, y, b);
    EXPECT_NEAR(m.inner(ta, tb), m.inner(a, b), 1e-10);
    EXPECT_LT((m.project_tangent(y, ta) - ta).norm(), 1e-10);
    EXPECT_LT((m.transport(y, x, ta) - a).norm(), 1e-10);
    EXPECT_LT((m.transport_along(x, m.log(x, y), a) - ta).norm(), 1e-10);
  }
}

TEST_P(ModelTest, GeodesicVelocityIsTransportedInitialVelocity) {
  const AmbientModel m = model();
  std::mt19937_64 rng(30 + GetParam());
  for (int k = 0; k < 20; ++k) {
    const Vec x = point(m, rng);
    const Vec v = 0.7 * tangent(m, x, rng);
    EXPECT_LT((m.geodesic_velocity(x, v) - m.transport_along(x, v, v)).norm(), 1e-10);
    // Central difference of the geodesic at s = 1.
    const double h = 1e-5;
    const Vec fd = (m.exp(x, (1 + h) * v) - m.exp(x, (1 - h) * v)) / (2 * h);
    EXPECT_LT((fd - m.geodesic_velocity(x, v)).norm(), 1e-7);
  }
}

TEST_P(ModelTest, CurvatureSymmetries) {
  const AmbientModel m = model();
  std::mt19937_64 rng(40 + GetParam());
  for (int k = 0; k < 20; ++k) {
    const Vec x = point(m, rng);
    const Vec a = tangent(m, x, rng), b = tangent(m, x, rng), c = tangent(m, x, rng),
              d = tangent(m, x, rng);
    EXPECT_LT((m.curvature(x, a, b, c) + m.curvature(x, b, a, c)).norm(), 1e-12);
    EXPECT_NEAR(m.inner(m.curvature(x, a, b, c), d), m.inner(m.curvature(x, c, d, a), b), 1e-10);
    const Vec bianchi = m.curvature(x, a, b, c) + m.curvature(x, b, c, a) + m.curvature(x, c, a, b);
    EXPECT_LT(bianchi.norm(), 1e-10);
    // Sectional curvature has the sign of epsilon.
    const double sec = m.inner(m.curvature(x, a, b, b), a);
    if (m.epsilon() == 0) EXPECT_EQ(sec, 0.0);
    if (m.epsilon() > 0) EXPECT_GE(sec, -1e-12);
    if (m.epsilon() < 0) EXPECT_LE(sec, 1e-12);
  }
}

TEST_P(ModelTest, JacobiPropagatorMatchesRk4) {
  const AmbientModel m = model();
  std::mt19937_64 rng(50 + GetParam());
  for (int k = 0; k < 10; ++k) {
    const Vec x = point(m, rng);
    const Vec w = tangent(m, x, rng);
    const Vec y0 = tangent(m, x, rng), y1 = tangent(m, x, rng);
    const double s = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    EXPECT_LT((propagate_jacobi(m, x, w, y0, y1, s) - jacobi_rk4(m, x, w, y0, y1, s)).norm(), 1e-6);
  }
}

TEST_P(ModelTest, HolonomyMatchesLoopDerivative) {
  const AmbientModel m = model();
  std::mt19937_64 rng(60 + GetParam());
  for (int k = 0; k < 10; ++k) {
    const Vec p = point(m, rng);
    const Vec v = tangent(m, p, rng);
    const Vec w = tangent(m, m.base_point(), rng);
    const Vec closed = tau_hol(m, p, v, w);
    EXPECT_LT((closed - loop_holonomy_derivative(m, p, v, w)).norm(), 1e-6);
    if (m.epsilon() == 0) EXPECT_EQ(closed.norm(), 0.0);
  }
}

class CurvedModelTest : public ModelTest {};

TEST_P(CurvedModelTest, RootIdentity) {
  const AmbientModel m = model();
  std::mt19937_64 rng(70 + GetParam());
  const Vec p0 = m.base_point();
  for (int k = 0; k < 10; ++k) {
    const Vec v = tangent(m, p0, rng);
    const RootData data = root_data(m, p0, v / m.norm(v));
    std::vector<Vec> ws;
    for (int j = 0; j < 5; ++j) {
      const Eigen::VectorXd c = Eigen::VectorXd::Random(data.abelian.cols());
      ws.push_back(data.abelian * c);
    }
    EXPECT_LT(root_identity_residual(m, p0, data, ws), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Models, ModelTest, ::testing::Range(0, 4));
INSTANTIATE_TEST_SUITE_P(Models, CurvedModelTest, ::testing::Range(1, 4));

TEST(Symspace, EuclideanIsFlat) {
  const AmbientModel m = AmbientModel::euclidean(3);
  std::mt19937_64 rng(80);
  const Vec x = point(m, rng), a = tangent(m, x, rng);
  EXPECT_EQ(m.jacobi_operator(x, a).norm(), 0.0);
  EXPECT_EQ((m.transport(x, point(m, rng), a) - a).norm(), 0.0);
  EXPECT_TRUE(std::isinf(m.conjugate_radius()));
}

TEST(Symspace, SphereProductBlockCurvature) {
  // R_i(u)w = |u|^2 w - <u,w> u on each unit-sphere factor.
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Vec p0 = m.base_point();
  std::mt19937_64 rng(81);
  const Vec u = tangent(m, p0, rng), w = tangent(m, p0, rng);
  const Vec r = m.curvature(p0, w, u, u);
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = m.factor_range(i);
    const Vec ui = u.segment(start, len), wi = w.segment(start, len);
    const Vec expected = ui.squaredNorm() * wi - ui.dot(wi) * ui;
    EXPECT_LT((r.segment(start, len) - expected).norm(), 1e-12);
  }
  EXPECT_NEAR(m.conjugate_radius(), kPi, 1e-14);
}

TEST(Symspace, HolonomyVanishesAlongRadialGeodesics) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  std::mt19937_64 rng(82);
  const Vec p0 = m.base_point();
  for (int k = 0; k < 10; ++k) {
    const Vec p = point(m, rng);
    const Vec radial = m.geodesic_velocity(p0, m.log(p0, p));
    EXPECT_LT(tau_hol(m, p, 1.3 * radial, tangent(m, p0, rng)).norm(), 1e-12);
  }
}

TEST(Symspace, ExpLogAtConjugatePointThrows) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  Vec antipode = m.base_point();
  const auto [start, len] = m.factor_range(0);
  antipode.segment(start, len) *= -1.0;
  EXPECT_THROW(m.log(m.base_point(), antipode), CutLocusError);
}

TEST(Symspace, Hausdorff) {
  EXPECT_EQ(hausdorff({}, {}), 0.0);
  EXPECT_TRUE(std::isinf(hausdorff({1.0}, {})));
  EXPECT_DOUBLE_EQ(hausdorff({0.0, 1.0}, {0.0, 1.5}), 0.5);
  EXPECT_DOUBLE_EQ(hausdorff({0.0}, {0.0, 2.0}), 2.0);
}

TEST(Symspace, JacobiSpectrumFunctions) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  std::mt19937_64 rng(83);
  const Vec p0 = m.base_point();
  const Vec w = tangent(m, p0, rng);
  const JacobiSpectrum spec(m, p0, w);
  for (double s : {0.3, 0.9}) {
    const Mat co = spec.cosine(s), si = spec.scaled_sine(s);
    // Y = co Y0 + si Y0' solves the Jacobi equation.
    const Vec y0 = tangent(m, p0, rng), y1 = tangent(m, p0, rng);
    const Vec jac = propagate_jacobi(m, p0, w, y0, y1, s);
    const Vec expected = m.transport_along(p0, s * w, Vec(co * y0 + si * y1));
    EXPECT_LT((jac - expected).norm(), 1e-10);
  }
  EXPECT_LT((spec.sinc(0.0) - spec.cosine(0.0)).norm(), 1e-14);
}
