#pragma once

// Discretized immersed hypersurfaces f : M -> M~ given as a function of the
// point y of the abstract manifold M (a product of unit spheres). Quadrature
// runs over a structured parameter grid; derivatives are fourth-order central
// differences in a chart centred at the point being sampled, so poles of the
// grid parametrization cost no accuracy.

#include "aniso/lagrangian.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/symspace.hpp"
#include "aniso/types.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace aniso {

enum class DomainKind { Sphere2, Sphere3, Torus2, Sphere2Circle };

std::string to_string(DomainKind kind);

/// The abstract manifold M with a pole-free quadrature grid.
///   Sphere2:       S^2 in R^3, u = (polar in (0,pi), azimuth)
///   Sphere3:       S^3 in R^4, u = (theta in (0,pi/2), a, b) with
///                  y = (cos theta e^{ia}, sin theta e^{ib})
///   Torus2:        S^1 x S^1 in R^4, u = (a, b)
///   Sphere2Circle: S^2 x S^1 in R^3 x R^2, u = (polar, azimuth, b)
class Domain {
 public:
  static Domain sphere2(int polar, int azimuth);
  static Domain sphere3(int theta, int a, int b);
  static Domain torus2(int a, int b);
  static Domain sphere2_circle(int polar, int azimuth, int b);
  /// Unit sphere S^dim with the same resolution in every direction.
  static Domain sphere(int dim, int resolution);

  DomainKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(axes_.size()); }
  int embed_dim() const;
  /// Sphere factors of the embedding, as (start, length) coordinate ranges.
  const std::vector<std::pair<int, int>>& factors() const { return factors_; }

  Vec embed(const Param& u) const;
  /// Columns: partial derivatives of embed with respect to u.
  Mat embed_jacobian(const Param& u) const;
  /// Projection of an embedding-space vector onto T_yM.
  Vec project_tangent(const Vec& y, const Vec& w) const;
  /// Nearest point of M (factorwise normalization).
  Vec project_point(const Vec& z) const;

  std::size_t node_count() const;
  std::vector<int> shape() const;
  Param node(std::size_t index) const;
  /// Parameter-space quadrature weight (dV = sqrt(det g) du).
  double weight(std::size_t index) const;
  const QuadratureRule& axis(int i) const { return axes_[i]; }

 private:
  Domain(DomainKind kind, std::vector<QuadratureRule> axes);
  DomainKind kind_;
  std::vector<QuadratureRule> axes_;
  std::vector<std::pair<int, int>> factors_;
};

/// Chart s -> project_point(center + basis s) of M around a point, with an
/// orthonormal basis of T_centerM (block-diagonal over the sphere factors).
struct LocalChart {
  Vec center;
  Mat basis;

  static LocalChart around(const Domain& domain, const Vec& y);
  Vec at(const Domain& domain, const Vec& s) const;
  /// dy/ds at s.
  Mat jacobian(const Domain& domain, const Vec& s) const;
};

/// |det ds/du| at u for the chart centred at embed(u): dV = sqrt_g(s) |det ds/du| du.
double parameter_density(const Domain& domain, const LocalChart& chart, const Param& u);

class Immersion {
 public:
  /// f as a function of the point y of M (embedding coordinates of the domain).
  using ChartFn = std::function<Vec(const Vec&)>;
  /// Reference vector at x = f(y): the unit normal is oriented to have positive inner product with it.
  using OrientFn = std::function<Vec(const Vec&, const Vec&)>;

  Immersion(AmbientModel model, Domain domain, ChartFn chart, OrientFn orient,
            double step = 2e-3);

  const AmbientModel& model() const { return model_; }
  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  double step() const { return step_; }

  Vec point(const Param& u) const { return chart_(domain_.embed(u)); }
  Vec point_at(const Vec& y) const { return chart_(y); }
  Vec orientation(const Vec& y, const Vec& x) const { return orient_(y, x); }
  const ChartFn& chart() const { return chart_; }
  const OrientFn& orient() const { return orient_; }

  /// Copy with a different domain resolution.
  Immersion with_domain(Domain domain) const;

 private:
  AmbientModel model_;
  Domain domain_;
  ChartFn chart_;
  OrientFn orient_;
  double step_;
};

/// First-order data of f at one point, in the coordinates s of a local chart.
struct LocalFrame {
  Vec y;       // point of M
  Vec point;   // f(y)
  Mat frame;   // columns d f / d s_i, embedding coordinates
  Mat metric;  // induced metric g_ij
  double sqrt_g = 0.0;
  double condition = 0.0;  // singular-value ratio of the frame
  Vec normal;              // unit normal xi
};

/// Pointwise anisotropic data at a point with unit normal xi.
struct AnisotropicVector {
  Vec nu;        // Gauss image, base coordinates
  double value;  // F(nu)
  Vec gradient;  // (grad F)_nu, base coordinates
  Vec w;         // transported gradient at the point
  Vec xi_f;      // F(nu) xi + w
};

/// Second-order data at a grid parameter u. Frame, metric and operators are in the
/// coordinates of the chart centred at y = embed(u).
struct SurfaceSample {
  Param u;
  Vec y;
  Vec point;
  Mat frame;
  Mat metric;
  double sqrt_g = 0.0;
  double density = 0.0;  // dV/du
  double condition = 0.0;
  Vec xi;
  Vec nu;
  double f_value = 0.0;
  Vec gradient;
  Vec w;
  Vec xi_f;
  Mat shape;        // A: f_*(A X) = -(d_X xi)^T
  Mat aniso_shape;  // A^F: f_*(A^F X) = -(d_X xi_F)^T
  double mean = 0.0;        // tr A
  double aniso_mean = 0.0;  // tr A^F
  double aniso_mean_div = 0.0;  // F H - div(W_T)
  double normal_residual = 0.0;  // |<xi_F derivative, xi>| relative, zero for invariant F
  double tangency = 0.0;         // |<W, xi>| / |W|
};

/// Points s, s +- h e_i, s +- 2h e_i in the order used by the stencil helpers.
std::vector<Vec> stencil_points(const Vec& s, double h);

/// Domain points of the stencil around s in a chart.
std::vector<Vec> stencil_points(const Domain& domain, const LocalChart& chart, const Vec& s,
                                double h);

/// Fourth-order central difference along direction dir from stencil values.
Vec stencil_derivative(const std::vector<Vec>& values, int dir, double h);
double stencil_derivative(const std::vector<double>& values, int dir, double h);

/// Unit normal of an (n+1)-dimensional tangent space spanned by frame plus xi, oriented by ref.
Vec unit_normal(const AmbientModel& model, const Vec& x, const Mat& frame, const Vec& ref);

/// Frame at chart coordinate s.
LocalFrame local_frame(const Immersion& f, const LocalChart& chart, const Vec& s);
/// Frame at the point y of M, in the chart centred at y.
LocalFrame local_frame_at(const Immersion& f, const Vec& y);
/// Frame from the images of stencil_points(domain, chart, s, f.step()).
LocalFrame local_frame_from(const Immersion& f, const Vec& y, const std::vector<Vec>& points);

/// Frames at the stencil around the grid parameter u (centre first), in the chart at embed(u).
std::vector<LocalFrame> stencil_frames(const Immersion& f, const LocalChart& chart);

/// Gauss map value nu = tau_x^{-1}(xi) in base coordinates.
Vec gauss_image(const AmbientModel& model, const Vec& x, const Vec& xi);

AnisotropicVector anisotropic_vector(const AmbientModel& model, const Lagrangian& lagrangian,
                                     const Vec& x, const Vec& xi);

/// Second-order data from stencil_frames(f, chart); density is left for the caller.
SurfaceSample assemble_sample(const Immersion& f, const Lagrangian& lagrangian,
                              const std::vector<LocalFrame>& frames);

SurfaceSample surface_sample(const Immersion& f, const Lagrangian& lagrangian, const Param& u);

/// Samples at every grid node, node-parallel.
std::vector<SurfaceSample> sample_all(const Immersion& f, const Lagrangian& lagrangian);

/// Real parts of the eigenvalues of A^F (or A), ascending, and the largest imaginary part.
std::pair<Vec, double> real_spectrum(const Mat& operator_matrix);

/// |A g^{-1}...| asymmetry of an operator with respect to the metric: |gA - (gA)^T| / |gA|.
double metric_asymmetry(const Mat& metric, const Mat& op);

/// Frobenius norm of an operator in an orthonormal basis of the given metric.
double metric_operator_norm(const Mat& metric, const Mat& op);

/// Round torus in R^3 with core radius big and tube radius small.
Immersion euclidean_torus(double big, double small, const Domain& domain, double step = 2e-3);

/// Ellipsoid in R^3 with the given semi-axes.
Immersion euclidean_ellipsoid(const std::array<double, 3>& axes, const Domain& domain,
                              double step = 2e-3);

/// Radial graph exp_{p0}(r (1 + amplitude * y_last^2) y) over the unit sphere of T_{p0}M.
Immersion graph_over_sphere(const AmbientModel& model, double radius, double amplitude,
                            const Domain& domain, double step = 2e-3);

}  // namespace aniso
