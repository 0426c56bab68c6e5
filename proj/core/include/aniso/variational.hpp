#pragma once

// Anisotropic energy, first-variation verification, critical-point tests and a
// steepest-descent flow.

#include "aniso/hypersurface.hpp"
#include "aniso/lagrangian.hpp"

#include <functional>
#include <random>
#include <vector>

namespace aniso {

/// Vector-valued polynomial in the embedding coordinates of a domain.
class PolynomialField {
 public:
  /// All monomials of total degree <= degree.
  PolynomialField(int embed_dim, int degree, int components);
  /// Monomials restricted to a basis of the polynomial functions on the domain: the
  /// last coordinate of each sphere factor appears at most linearly.
  PolynomialField(const Domain& domain, int degree, int components);
  /// Least-squares fit of per-node values on the domain grid.
  static PolynomialField fit(const Domain& domain, const std::vector<Vec>& values, int degree);

  Vec eval(const Vec& y) const;
  int degree() const { return degree_; }
  int terms() const { return static_cast<int>(exponents_.size()); }
  Eigen::MatrixXd& coefficients() { return coefficients_; }
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }
  Eigen::VectorXd basis(const Vec& y) const;

 private:
  int embed_dim_;
  int degree_;
  std::vector<std::vector<int>> exponents_;
  Eigen::MatrixXd coefficients_;  // terms x components
};

/// V = f_*(V_T) + psi xi, with psi and V_T given on the domain manifold.
struct Variation {
  std::function<double(const Vec&)> psi;      // of the domain point y
  std::function<Vec(const Vec&)> tangent;     // tangent field at y, embedding coordinates
};

/// Components of the tangent part at chart coordinate s.
Vec tangent_components(const Domain& domain, const Variation& variation, const LocalChart& chart,
                       const Vec& s);

/// Random smooth variation: psi a quadratic polynomial, tangent part the projection of
/// an affine field. Mean-zero psi (with respect to dV of f) when requested.
Variation random_variation(const Immersion& f, std::mt19937_64& rng, bool mean_zero,
                           bool with_tangent = true);

/// Subtracts the dV-weighted mean of psi over f.
Variation mean_zero(const Immersion& f, Variation variation);

/// Integral of psi dV over f.
double integrate(const Immersion& f, const std::function<double(const Vec&)>& psi);

/// Quadrature of (F o nu) sqrt(g) over the grid.
double energy(const Immersion& f, const Lagrangian& lagrangian);

/// Area (F = 1).
double area(const Immersion& f);

struct FirstVariationReport {
  double fd_derivative = 0.0;
  double formula_value = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double step = 0.0;
};

struct FirstVariationOptions {
  double step = 1e-4;
  int retries = 4;
};

/// Richardson-extrapolated d/dt F(f_t) at t = 0 against -integral psi H_F dV, for each variation.
std::vector<FirstVariationReport> verify_first_variation(const Immersion& f,
                                                         const Lagrangian& lagrangian,
                                                         const std::vector<Variation>& variations,
                                                         const FirstVariationOptions& options = {});

enum class CriticalMode { Free, VolumePreserving };

struct CriticalPointReport {
  CriticalMode mode = CriticalMode::Free;
  std::vector<double> derivatives;
  double max_derivative = 0.0;
  double max_abs_mean = 0.0;  // max |H_F|
  double spread = 0.0;        // max - min H_F
  bool critical_by_derivative = false;
  bool critical_by_curvature = false;
  bool consistent = false;
};

/// Tests `count` random variations (mean-zero psi in volume-preserving mode) plus one variation
/// aligned with the fluctuation of H_F, and compares with the pointwise criterion on H_F.
CriticalPointReport verify_critical_point(const Immersion& f, const Lagrangian& lagrangian,
                                          CriticalMode mode, int count, std::mt19937_64& rng,
                                          double tolerance = 1e-6);

struct FlowStep {
  int step = 0;
  double dt = 0.0;
  double energy = 0.0;
  double max_abs_mean = 0.0;
  double spread = 0.0;
  int rejections = 0;
};

struct FlowOptions {
  int steps = 10;
  double dt = 1e-3;
  CriticalMode mode = CriticalMode::Free;
  int degree = 6;        // polynomial degree of the displacement field
  int max_halvings = 8;
};

struct FlowReport {
  std::vector<FlowStep> trajectory;  // entry 0 is the initial state
  bool monotone = true;
};

/// Steepest descent x -> exp_x(dt psi xi) with psi = H_F (minus its mean in volume-preserving
/// mode); the surface is kept as the initial chart plus a fitted polynomial displacement.
FlowReport gradient_flow(const Immersion& f, const Lagrangian& lagrangian, const FlowOptions& options);

}  // namespace aniso
