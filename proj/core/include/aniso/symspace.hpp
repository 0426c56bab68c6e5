#pragma once

// Ambient symmetric spaces: Euclidean space and products of two rank-one
// factors (unit spheres or hyperboloids), with closed-form geodesics,
// parallel transport, curvature and restricted-root data.
//
// Points and tangent vectors live in embedding coordinates. Tangent vectors
// at the base point p0 are also exchanged in "base coordinates", the
// R^{n+1} on which the Lagrangian is defined.

#include "aniso/types.hpp"

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace aniso {

enum class ModelKind { Euclidean, SphereProduct, HyperbolicProduct };

std::string to_string(ModelKind kind);

class AmbientModel {
 public:
  static AmbientModel euclidean(int dim);
  static AmbientModel sphere_product(int p, int q);
  static AmbientModel hyperbolic_product(int p, int q);

  ModelKind kind() const { return kind_; }
  int p() const { return p_; }
  int q() const { return q_; }
  /// Curvature sign: 0 flat, +1 compact type, -1 non-compact type.
  int epsilon() const;
  /// Intrinsic dimension n+1 of the ambient manifold.
  int tangent_dim() const;
  /// Number of embedding coordinates.
  int embed_dim() const;
  /// First conjugate radius (infinity for flat and non-compact models).
  double conjugate_radius() const;
  std::string describe() const;

  Vec base_point() const;
  /// Base coordinates (R^{n+1}) to an ambient tangent vector at p0, and back.
  Vec from_base(const Vec& t) const;
  Vec to_base(const Vec& w) const;

  /// Metric of the embedding: Euclidean, or Minkowski (-,+,...) per hyperbolic factor.
  double inner(const Vec& a, const Vec& b) const;
  double norm(const Vec& a) const;
  /// Diagonal of the embedding metric.
  Vec metric_signs() const;

  Vec project_point(const Vec& x) const;
  Vec project_tangent(const Vec& x, const Vec& w) const;
  /// Largest violation of the embedding constraints at x.
  double constraint_residual(const Vec& x) const;

  Vec exp(const Vec& x, const Vec& v) const;
  Vec log(const Vec& x, const Vec& y) const;
  double distance(const Vec& x, const Vec& y) const;
  /// Parallel transport of w from x to y along the shortest geodesic.
  Vec transport(const Vec& x, const Vec& y, const Vec& w) const;
  /// Parallel transport of w along s -> exp_x(s v), s in [0,1].
  Vec transport_along(const Vec& x, const Vec& v, const Vec& w) const;
  /// Velocity of s -> exp_x(s v) at s = 1.
  Vec geodesic_velocity(const Vec& x, const Vec& v) const;

  /// R(a,b)c.
  Vec curvature(const Vec& x, const Vec& a, const Vec& b, const Vec& c) const;
  /// Matrix (embedding coordinates) of y -> R(y,v)v on T_xM, zero on the normal space.
  Mat jacobi_operator(const Vec& x, const Vec& v) const;

  /// Orthonormal basis of T_xM, as embedding columns.
  Mat tangent_frame(const Vec& x) const;

  /// Elements of the holonomy group at p0, acting on base coordinates.
  std::vector<Mat> holonomy_samples(std::size_t count, std::mt19937_64& rng) const;

  /// Component ranges of factor i (0 or 1) in embedding coordinates.
  std::pair<int, int> factor_range(int i) const;

 private:
  AmbientModel(ModelKind kind, int p, int q) : kind_(kind), p_(p), q_(q) {}
  double factor_inner(int i, const Vec& a, const Vec& b) const;

  ModelKind kind_;
  int p_;
  int q_;
};

/// The totally geodesic factor S^p x {q0} (or H^p x {q0}) through p0.
struct ReflectiveFactor {
  int factor = 0;
};

struct Root {
  /// Coefficients of the root on the abelian frame.
  Vec functional;
  /// Orthonormal basis of the root space, embedding columns.
  Mat space;
  int multiplicity = 0;
  /// Split of the root space along a reflective base: tangent (h) and normal (q) parts.
  Mat horizontal;
  Mat vertical;
  double operator()(const Mat& abelian, const Vec& w, const AmbientModel& model) const;
};

struct RootData {
  int epsilon = 0;
  /// Orthonormal basis of the maximal abelian subspace through v.
  Mat abelian;
  std::vector<Root> roots;
  /// Split of the abelian subspace along a reflective base.
  Mat abelian_horizontal;
  Mat abelian_vertical;
};

RootData root_data(const AmbientModel& model, const Vec& x, const Vec& v,
                   std::optional<ReflectiveFactor> base = std::nullopt);

/// Largest deviation of R(w) from epsilon * alpha(w)^2 on each root space, over the given w.
double root_identity_residual(const AmbientModel& model, const Vec& x, const RootData& data,
                              const std::vector<Vec>& ws);

/// Spectral functions of R(w) at x.
class JacobiSpectrum {
 public:
  JacobiSpectrum(const AmbientModel& model, const Vec& x, const Vec& w);
  /// cos(s sqrt R(w)).
  Mat cosine(double s) const;
  /// sin(s sqrt R(w)) / (s sqrt R(w)); identity at s = 0.
  Mat sinc(double s) const;
  /// s * sinc(s).
  Mat scaled_sine(double s) const;
  /// (id - cos(sqrt R(w))) / R(w), with limit 1/2 on the kernel.
  Mat holonomy_kernel() const;
  const Vec& eigenvalues() const { return eigenvalues_; }

 private:
  template <class Fn>
  Mat apply(Fn fn) const;

  Mat frame_;     // orthonormal tangent frame at x
  Mat lowering_;  // frame^T G
  Mat vectors_;   // eigenvectors in frame coordinates
  Vec eigenvalues_;
};

/// (D^co_{sw}, D^si_{sw}) as matrices in embedding coordinates at x.
std::pair<Mat, Mat> dco_dsi(const AmbientModel& model, const Vec& x, const Vec& w, double s);

/// Jacobi field along s -> exp_x(s w) with Y(0)=y0, Y'(0)=y0prime, evaluated at s.
Vec propagate_jacobi(const AmbientModel& model, const Vec& x, const Vec& w, const Vec& y0,
                     const Vec& y0prime, double s);

/// Infinitesimal holonomy of the loop p0 -> p -> c(s) -> p0 with c'(0) = v, applied to w.
Vec tau_hol(const AmbientModel& model, const Vec& p, const Vec& v, const Vec& w);

struct FocalRoot {
  double s = 0.0;
  int multiplicity = 0;
};

struct FocalRadiiReport {
  std::vector<FocalRoot> roots;
  double lo = 0.0;
  double hi = 0.0;
};

/// Local data of a hypersurface needed by the focal determinant.
struct FocalSample {
  Vec point;
  Mat frame;  // f_* of a basis of T_xM, embedding columns
  Mat shape;  // A^F in that basis
  Vec xi;     // unit normal
  Vec xi_f;   // anisotropic transversal vector
};

struct FocalSearch {
  double lo = -4.0;
  double hi = 4.0;
  int grid = 4000;
  double tolerance = 1e-10;
  double rank_threshold = 1e-7;
};

FocalRadiiReport focal_radii(const AmbientModel& model, const FocalSample& sample,
                             const FocalSearch& search = {});

/// Symmetric Hausdorff distance between two root sets (infinite if exactly one is empty).
double hausdorff(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace aniso
