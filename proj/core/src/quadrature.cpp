#include "aniso/quadrature.hpp"

#include "aniso/errors.hpp"
#include "aniso/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace aniso {

QuadratureRule gauss_legendre(int count, double lo, double hi) {
  if (count < 1) throw UsageError("gauss_legendre: need at least one node");
  // Golub-Welsch: eigenvalues of the Jacobi matrix are the nodes on [-1, 1].
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd off(std::max(count - 1, 0));
  for (int k = 1; k < count; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  QuadratureRule rule;
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < count; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    rule.nodes.push_back(mid + half * eig.eigenvalues()(i));
    rule.weights.push_back(2.0 * v0 * v0 * half);
  }
  return rule;
}

QuadratureRule periodic_trapezoid(int count, double lo, double hi) {
  if (count < 1) throw UsageError("periodic_trapezoid: need at least one node");
  QuadratureRule rule;
  const double h = (hi - lo) / count;
  for (int i = 0; i < count; ++i) {
    rule.nodes.push_back(lo + h * i);
    rule.weights.push_back(h);
  }
  return rule;
}

}  // namespace aniso
