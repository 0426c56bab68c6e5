#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <numbers>

namespace aniso {

// Largest embedding dimension supported by the fixed-capacity linear algebra
// types. Products S^p x S^q need p + q + 2 embedding coordinates.
inline constexpr int kMaxDim = 10;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Chart parameters of an n-dimensional hypersurface.
using Param = Vec;

inline constexpr double kPi = std::numbers::pi;

inline Vec unit_vector(int dim, int index) {
  Vec e = Vec::Zero(dim);
  e(index) = 1.0;
  return e;
}

}  // namespace aniso
