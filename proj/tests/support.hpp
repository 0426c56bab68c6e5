#pragma once

#include "aniso/symspace.hpp"

#include <random>

namespace testing_support {

inline aniso::Vec gaussian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  aniso::Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal(rng);
  return v;
}

inline aniso::Vec unit(int dim, std::mt19937_64& rng) {
  aniso::Vec v = gaussian(dim, rng);
  return v / v.norm();
}

inline aniso::Vec tangent(const aniso::AmbientModel& m, const aniso::Vec& x, std::mt19937_64& rng) {
  return m.project_tangent(x, gaussian(m.embed_dim(), rng));
}

// A point at geodesic distance in [lo, hi] from p0.
inline aniso::Vec point(const aniso::AmbientModel& m, std::mt19937_64& rng, double lo = 0.1,
                        double hi = 1.2) {
  const aniso::Vec p0 = m.base_point();
  aniso::Vec u = tangent(m, p0, rng);
  u *= std::uniform_real_distribution<double>(lo, hi)(rng) / m.norm(u);
  return m.exp(p0, u);
}

inline std::vector<aniso::AmbientModel> models() {
  return {aniso::AmbientModel::euclidean(4), aniso::AmbientModel::sphere_product(2, 2),
          aniso::AmbientModel::hyperbolic_product(2, 2), aniso::AmbientModel::sphere_product(3, 2)};
}

}  // namespace testing_support
