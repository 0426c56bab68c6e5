#include "aniso/oracles.hpp"

#include "aniso/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <vector>

namespace aniso {

Vec jacobi_rk4(const AmbientModel& model, const Vec& x, const Vec& w, const Vec& y0,
               const Vec& y0prime, double s, double step) {
  if (!(step > 0.0)) throw UsageError("jacobi_rk4: step must be positive");
  const Mat e0 = model.tangent_frame(x);
  const int m = static_cast<int>(e0.cols());
  const Vec signs = model.metric_signs();

  auto frame_at = [&](double t) {
    Mat e(e0.rows(), m);
    for (int i = 0; i < m; ++i) e.col(i) = model.transport_along(x, t * w, e0.col(i));
    return e;
  };
  // Coefficients of R(E_j, c')c' on the parallel frame E_i.
  auto curvature_matrix = [&](double t) {
    const Mat e = frame_at(t);
    const Vec point = model.exp(x, t * w);
    const Vec velocity = model.transport_along(x, t * w, w);
    Mat k(m, m);
    for (int j = 0; j < m; ++j) {
      const Vec r = model.curvature(point, e.col(j), velocity, velocity);
      for (int i = 0; i < m; ++i) k(i, j) = e.col(i).dot(signs.asDiagonal() * r);
    }
    return k;
  };

  using State = std::vector<double>;
  State state(2 * m);
  for (int i = 0; i < m; ++i) {
    state[i] = e0.col(i).dot(signs.asDiagonal() * y0);
    state[m + i] = e0.col(i).dot(signs.asDiagonal() * y0prime);
  }
  auto rhs = [&](const State& z, State& dz, double t) {
    const Mat k = curvature_matrix(t);
    for (int i = 0; i < m; ++i) {
      dz[i] = z[m + i];
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += k(i, j) * z[j];
      dz[m + i] = -acc;
    }
  };
  const int count = std::max(1, static_cast<int>(std::ceil(std::abs(s) / step)));
  const double dt = s / count;
  boost::numeric::odeint::runge_kutta4<State> stepper;
  double t = 0.0;
  for (int k = 0; k < count; ++k, t += dt) stepper.do_step(rhs, state, t, dt);

  const Mat e = frame_at(s);
  Vec y = Vec::Zero(x.size());
  for (int i = 0; i < m; ++i) y += state[i] * e.col(i);
  return y;
}

Vec loop_holonomy_derivative(const AmbientModel& model, const Vec& p, const Vec& v, const Vec& w,
                             double h) {
  const Vec p0 = model.base_point();
  const Vec at_p = model.transport(p0, p, w);
  auto loop = [&](double s) {
    const Vec moved = model.transport_along(p, s * v, at_p);
    return Vec(model.transport(model.exp(p, s * v), p0, moved));
  };
  auto central = [&](double step) { return Vec((loop(step) - loop(-step)) / (2.0 * step)); };
  return (4.0 * central(h) - central(2.0 * h)) / 3.0;
}

}  // namespace aniso
