#pragma once

// Anisotropic geodesic spheres, anisotropic tubes over a product factor, their
// parallel hypersurfaces, and the closed-form spectra and focal radii they
// are checked against.

#include "aniso/hypersurface.hpp"
#include "aniso/lagrangian.hpp"
#include "aniso/symspace.hpp"

#include <optional>
#include <vector>

namespace aniso {

enum class BaseKind { Point, Factor };

struct TubeSpec {
  BaseKind base = BaseKind::Point;
  int factor = 0;  // for BaseKind::Factor: the factor S^p x {q0} the tube is built around
  double radius = 0.3;
};

/// Throws RadiusBoundError unless r < r_M / (2 max |F(v)v + grad F|) on compact-type models.
void check_radius_bound(const AmbientModel& model, const Lagrangian& lagrangian, double radius);

/// v -> exp_{p0}(r (F(v)v + grad F_v)) over the unit sphere of T_{p0}M.
Immersion geodesic_sphere(const AmbientModel& model, const Lagrangian& lagrangian, double radius,
                          const Domain& domain, double step = 2e-3);

/// Anisotropic tube of radius r over the factor S^2 x {q0} of S^2 x S^2 (factor 0 or 1).
Immersion reflective_tube(const AmbientModel& model, const Lagrangian& lagrangian, int factor,
                          double radius, const Domain& domain, double step = 2e-3);

/// Default chart domain for a spec at the given resolution per direction.
Domain tube_domain(const AmbientModel& model, const TubeSpec& spec, int resolution);

Immersion build_tube(const AmbientModel& model, const Lagrangian& lagrangian, const TubeSpec& spec,
                     int resolution, double step = 2e-3);

/// f_t(x) = exp_{f(x)}(t xi_F(x)). With check set, every grid node must keep full rank.
Immersion parallel_hypersurface(const Immersion& f, const Lagrangian& lagrangian, double t,
                                bool check = true);

struct ClosedFormReport {
  Vec eigenvalues;                // ascending, with multiplicity
  std::vector<FocalRoot> afr;     // ascending, inside the search interval
  Vec xi_bar;                     // F(v)v + grad F_v in base coordinates
  std::vector<double> root_values;  // alpha(xi_bar) per positive root
};

/// Spectrum of A^F and focal radii of the geodesic sphere at the node with Gauss image v.
ClosedFormReport closed_form_sphere_spectrum(const AmbientModel& model, const Lagrangian& lagrangian,
                                             double radius, const Vec& v,
                                             const FocalSearch& search = {});

/// Same for the tube over a factor, at the unit normal v of the base (base coordinates).
ClosedFormReport closed_form_tube_spectrum(const AmbientModel& model, int factor,
                                           const Lagrangian& lagrangian, double radius,
                                           const Vec& v, const FocalSearch& search = {});

/// FocalSample of a surface sample.
FocalSample focal_sample(const SurfaceSample& s);

/// Distinct focal radii values of a report.
std::vector<double> root_values(const FocalRadiiReport& report);

/// Evenly spread grid nodes (count of them, deterministic).
std::vector<Param> spread_nodes(const Domain& domain, std::size_t count);

/// Seven offsets in [-r/2, r/2].
std::vector<double> default_t_grid(double radius);

struct EquifocalReport {
  std::vector<std::vector<double>> sets;
  double max_hausdorff = 0.0;
  bool pass = false;
};

EquifocalReport check_equifocal(const Immersion& f, const Lagrangian& lagrangian,
                                const std::vector<Param>& nodes, const FocalSearch& search = {},
                                double threshold = 1e-5);

struct IsoparametricReport {
  std::vector<double> t_grid;
  std::vector<double> spread;  // max - min of H_F over the nodes of f_t
  double max_spread = 0.0;
  bool pass = false;
};

IsoparametricReport check_isoparametric(const Immersion& f, const Lagrangian& lagrangian,
                                        const std::vector<double>& t_grid,
                                        const std::vector<Param>& nodes, double threshold = 1e-5);

struct CurvatureConstancyReport {
  double max_spread = 0.0;  // max over nodes and sorted entries of |lambda - lambda_ref|
  bool pass = false;
};

CurvatureConstancyReport check_constant_principal_curvatures(const Immersion& f,
                                                             const Lagrangian& lagrangian,
                                                             const std::vector<Param>& nodes,
                                                             double threshold = 1e-5);

struct EmbeddingReport {
  double min_separation = 0.0;  // smallest distance between images of distinct grid nodes
  bool pass = false;
};

EmbeddingReport check_embedded(const Immersion& f, double threshold = 1e-6);

struct ReconstructionReport {
  double max_distance = 0.0;
  int collapse_rank = 0;
  double offset = 0.0;
  std::size_t nodes = 0;
};

/// Collapses f onto f_s (s = offset), checks constant rank below n, rebuilds the tube
/// of radius -s over the collapsed image and measures the distance back to f.
ReconstructionReport reconstruct_from_focal(const Immersion& f, const Lagrangian& lagrangian,
                                            double offset, const std::vector<Param>& nodes,
                                            double rank_tolerance = 1e-6);

}  // namespace aniso
