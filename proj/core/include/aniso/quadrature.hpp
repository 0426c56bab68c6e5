#pragma once

#include <vector>

namespace aniso {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `count` nodes on [lo, hi] (interior nodes only).
QuadratureRule gauss_legendre(int count, double lo, double hi);

/// Periodic trapezoid rule with `count` equispaced nodes on [lo, hi).
QuadratureRule periodic_trapezoid(int count, double lo, double hi);

}  // namespace aniso
