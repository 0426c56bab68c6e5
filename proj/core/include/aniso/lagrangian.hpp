#pragma once

// Holonomy-invariant parametric Lagrangians F on the unit sphere S^n(1) of
// T_{p0}M. Only the restriction to the sphere is stored; the degree-one
// homogeneous extension is implied.

#include "aniso/types.hpp"

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace aniso {

class AmbientModel;

enum class LagrangianFamily { Constant, QuadraticForm, AngleProfile, NumericWrapper };

std::string to_string(LagrangianFamily family);

struct FiniteDifferenceSteps {
  double gradient = 1e-5;
  double hessian = 1e-4;
};

class Lagrangian {
 public:
  /// F == c on S^n. Requires c > 0.
  static Lagrangian constant(int n, double c);
  /// F(v) = sqrt(v^T Q v) with Q symmetric positive definite, (n+1)x(n+1).
  static Lagrangian quadratic_form(const Mat& q);
  /// F(v) = sum_k c_k cos(2k theta(v)), theta(v) = atan2(|v_2|, |v_1|) where
  /// v = (v_1, v_2) splits R^{n+1} as R^split x R^{n+1-split}.
  static Lagrangian angle_profile(int n, int split, std::vector<double> coefficients);
  /// Pointwise evaluator on unit vectors; derivatives by geodesic central differences.
  /// Positivity is not enforced (used for negative tests).
  static Lagrangian numeric(int n, std::function<double(const Vec&)> evaluator,
                            FiniteDifferenceSteps steps = {});

  LagrangianFamily family() const { return family_; }
  /// Sphere dimension n (F lives on S^n in R^{n+1}).
  int dimension() const { return n_; }
  int ambient_dim() const { return n_ + 1; }

  double eval(const Vec& v) const;
  /// Intrinsic gradient on S^n at v, as a vector of R^{n+1} orthogonal to v.
  Vec gradient(const Vec& v) const;
  /// Covariant Hessian nabla^S grad F at v, as a symmetric (n+1)x(n+1) matrix
  /// that annihilates v and maps T_vS^n into itself.
  Mat hessian(const Vec& v) const;

  // Family-specific accessors.
  double constant_value() const { return constant_; }
  const Mat& quadratic_matrix() const { return quadratic_; }
  int split() const { return split_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const FiniteDifferenceSteps& steps() const { return steps_; }

  /// Orbit angle theta(v) in [0, pi/2] for the angle-profile split.
  double orbit_angle(const Vec& v) const;
  /// phi(theta) and its first two derivatives (AngleProfile only).
  double profile(double theta) const;
  double profile_derivative(double theta) const;
  double profile_second_derivative(double theta) const;
  /// Unit vector (cos theta e_0, sin theta e_split) realizing a given orbit angle.
  Vec orbit_representative(double theta) const;

  std::string describe() const;

 private:
  Lagrangian() = default;
  void require_unit(const Vec& v) const;

  LagrangianFamily family_ = LagrangianFamily::Constant;
  int n_ = 0;
  double constant_ = 1.0;
  Mat quadratic_;
  int split_ = 0;
  std::vector<double> coefficients_;
  std::function<double(const Vec&)> evaluator_;
  FiniteDifferenceSteps steps_;
};

/// Orthonormal basis of v^perp in R^{dim}, as the columns of a dim x (dim-1) matrix.
Mat sphere_tangent_basis(const Vec& v);

/// Geodesic on the unit sphere: cos|w| v + sin|w| w/|w| for w tangent at v.
Vec sphere_exp(const Vec& v, const Vec& w);

struct ConvexityReport {
  double min_eigenvalue = 0.0;
  Vec argmin;
  std::size_t samples = 0;
  bool pass = false;
};

/// min over samples of lambda_min(nabla^S grad F + F id) and pass iff it exceeds tol.
ConvexityReport check_convexity(const Lagrangian& lagrangian, std::span<const Vec> samples,
                                double tol = 1e-8);

/// Uniform random points of S^{dim-1}.
std::vector<Vec> random_sphere_samples(int dim, std::size_t count, std::mt19937_64& rng);

/// Samples covering the orbit space: a theta grid for AngleProfile, random points otherwise.
std::vector<Vec> convexity_samples(const Lagrangian& lagrangian, std::size_t count,
                                   std::mt19937_64& rng);

/// max_k |F(g_k v) - F(v)| over explicit linear maps g_k of T_{p0}M.
double holonomy_residual(const Lagrangian& lagrangian, const Vec& v, std::span<const Mat> group);

/// Same, with group elements drawn from the holonomy group of the model.
double check_holonomy_invariance(const Lagrangian& lagrangian, const AmbientModel& model,
                                 const Vec& v, std::size_t orbit_samples, std::mt19937_64& rng);

/// max over S^n of |F(v)v + grad F(v)|, the radius of the unit Wulff shape.
double max_wulff_radius(const Lagrangian& lagrangian);

/// Inverse of the Wulff map: the unit v with F(v)v + grad F(v) = w.
/// Requires w on the unit Wulff shape boundary (up to a positive scale handled by the caller).
Vec wulff_normal(const Lagrangian& lagrangian, const Vec& w);

}  // namespace aniso
