#include "aniso/acceptance.hpp"

#include "aniso/errors.hpp"
#include "aniso/hypersurface.hpp"
#include "aniso/oracles.hpp"
#include "aniso/parallel.hpp"
#include "aniso/tubes.hpp"
#include "aniso/variational.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <iomanip>
#include <random>
#include <sstream>

namespace aniso {

namespace {

std::string sci(double x) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(2) << x;
  return out.str();
}

Lagrangian profile() { return Lagrangian::angle_profile(3, 2, {1.0, 0.1}); }

Lagrangian wulff_form() {
  Mat q = Mat::Zero(3, 3);
  q.diagonal() << 1.0, 1.5, 4.0;
  return Lagrangian::quadratic_form(q);
}

Vec random_tangent(const AmbientModel& model, const Vec& x, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec a(model.embed_dim());
  for (int i = 0; i < a.size(); ++i) a(i) = normal(rng);
  return model.project_tangent(x, a);
}

Vec random_point(const AmbientModel& model, std::mt19937_64& rng, double lo, double hi) {
  const Vec p0 = model.base_point();
  Vec u = random_tangent(model, p0, rng);
  u *= std::uniform_real_distribution<double>(lo, hi)(rng) / model.norm(u);
  return model.exp(p0, u);
}

std::vector<double> expand(const std::vector<FocalRoot>& roots) {
  std::vector<double> out;
  for (const auto& r : roots)
    for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.s);
  return out;
}

struct SphereStudy {
  double spectrum_error = 0.0;
  double focal_error = 0.0;
  bool multiplicities_agree = true;
  double max_eigenvalue = -std::numeric_limits<double>::infinity();
  bool only_minus_r = true;
  std::size_t samples = 0;
};

// Numeric A^F and rho(s) roots against the closed forms at 50 samples with theta in [0.1, 1.4].
SphereStudy sphere_study(const AmbientModel& model, double radius, std::mt19937_64& rng) {
  const Lagrangian f_lag = profile();
  const Immersion f = geodesic_sphere(model, f_lag, radius, Domain::sphere(3, 16));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  constexpr int kSamples = 50;
  std::vector<Param> params;
  for (int k = 0; k < kSamples; ++k) {
    Param u(3);
    u << 0.1 + 1.3 * k / (kSamples - 1.0), angle(rng), angle(rng);
    params.push_back(u);
  }
  SphereStudy study;
  study.samples = params.size();
  for (const Param& u : params) {
    const SurfaceSample s = surface_sample(f, f_lag, u);
    const Vec v = f.domain().embed(u);
    const ClosedFormReport cf = closed_form_sphere_spectrum(model, f_lag, radius, v);
    const Vec numeric = real_spectrum(s.aniso_shape).first;
    study.spectrum_error = std::max(study.spectrum_error, (numeric - cf.eigenvalues).cwiseAbs().maxCoeff());
    study.max_eigenvalue = std::max(study.max_eigenvalue, cf.eigenvalues.maxCoeff());
    const FocalRadiiReport found = focal_radii(model, focal_sample(s));
    std::vector<double> closed;
    for (const auto& root : cf.afr) closed.push_back(root.s);
    study.focal_error = std::max(study.focal_error, hausdorff(root_values(found), closed));
    const auto a = expand(found.roots), b = expand(cf.afr);
    bool same = a.size() == b.size();
    for (std::size_t k = 0; same && k < a.size(); ++k) same = std::abs(a[k] - b[k]) <= 1e-5;
    study.multiplicities_agree = study.multiplicities_agree && same;
    if (model.epsilon() < 0) {
      study.only_minus_r = study.only_minus_r && found.roots.size() == 1 &&
                           std::abs(found.roots.front().s + radius) <= 1e-5;
    }
  }
  return study;
}

CriterionResult isotropic_reduction() {
  CriterionResult r;
  const AmbientModel model = AmbientModel::euclidean(3);
  const Lagrangian one = Lagrangian::constant(2, 1.0);
  const Immersion f = geodesic_sphere(model, one, 0.7, Domain::sphere2(96, 96));
  double dh = 0.0, da = 0.0;
  for (const auto& s : sample_all(f, one)) {
    dh = std::max(dh, std::abs(s.aniso_mean - s.mean));
    da = std::max(da, metric_operator_norm(s.metric, s.aniso_shape - s.shape));
  }
  r.pass = dh < 1e-8 && da < 1e-8;
  r.detail = "96^2 sphere r=0.7: max|H_F-H|=" + sci(dh) + " max|A^F-A|=" + sci(da);
  return r;
}

CriterionResult first_variation(std::mt19937_64& rng) {
  CriterionResult r;
  double worst = 0.0;
  std::ostringstream detail;
  {
    const Lagrangian f_lag = wulff_form();
    const Immersion torus = euclidean_torus(1.0, 0.4, Domain::torus2(64, 64));
    std::vector<Variation> vs;
    for (int k = 0; k < 5; ++k) vs.push_back(random_variation(torus, rng, false));
    double e = 0.0;
    for (const auto& rep : verify_first_variation(torus, f_lag, vs)) e = std::max(e, rep.rel_error);
    worst = std::max(worst, e);
    detail << "torus/R^3 quadratic F rel=" << sci(e);
  }
  {
    const Lagrangian f_lag = profile();
    const Immersion sphere =
        geodesic_sphere(AmbientModel::sphere_product(2, 2), f_lag, 0.3, Domain::sphere(3, 64));
    std::vector<Variation> vs;
    for (int k = 0; k < 5; ++k) vs.push_back(random_variation(sphere, rng, false));
    double e = 0.0;
    for (const auto& rep : verify_first_variation(sphere, f_lag, vs)) e = std::max(e, rep.rel_error);
    worst = std::max(worst, e);
    detail << ", sphere/S^2xS^2 angle-profile F rel=" << sci(e);
  }
  r.pass = worst <= 1e-4;
  r.detail = detail.str();
  return r;
}

CriterionResult gauss_identity() {
  CriterionResult r;
  const Lagrangian f_lag = profile();
  std::ostringstream detail;
  bool pass = true;
  for (const AmbientModel& model :
       {AmbientModel::sphere_product(2, 2), AmbientModel::hyperbolic_product(2, 2)}) {
    const Immersion f = geodesic_sphere(model, f_lag, 0.3, Domain::sphere(3, 16));
    const auto nodes = spread_nodes(f.domain(), 500);
    std::vector<double> err(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
      const Vec v = f.domain().embed(nodes[i]);
      const LocalFrame lf = local_frame_at(f, v);
      err[i] = (gauss_image(model, lf.point, lf.normal) - v).norm();
    });
    const double worst = *std::max_element(err.begin(), err.end());
    pass = pass && worst < 1e-6;
    detail << model.describe() << " max|nu(v)-v|=" << sci(worst) << " over " << nodes.size()
           << "; ";
  }
  r.pass = pass;
  r.detail = detail.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

CriterionResult spectrum_oracle(std::mt19937_64& rng) {
  CriterionResult r;
  bool pass = true;
  std::ostringstream detail;
  for (const AmbientModel& model :
       {AmbientModel::sphere_product(2, 2), AmbientModel::hyperbolic_product(2, 2)}) {
    for (double radius : {0.2, 0.4}) {
      const SphereStudy st = sphere_study(model, radius, rng);
      pass = pass && st.spectrum_error <= 1e-4 && st.max_eigenvalue < 0.0;
      detail << model.describe() << " r=" << radius << " err=" << sci(st.spectrum_error)
             << " max eig=" << std::setprecision(4) << st.max_eigenvalue << "; ";
    }
  }
  r.pass = pass;
  r.detail = detail.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

CriterionResult focal_radii_oracle(std::mt19937_64& rng) {
  CriterionResult r;
  bool pass = true;
  std::ostringstream detail;
  for (const AmbientModel& model :
       {AmbientModel::sphere_product(2, 2), AmbientModel::hyperbolic_product(2, 2)}) {
    for (double radius : {0.2, 0.4}) {
      const SphereStudy st = sphere_study(model, radius, rng);
      bool ok = st.focal_error <= 1e-5 && st.multiplicities_agree;
      if (model.epsilon() < 0) ok = ok && st.only_minus_r;
      pass = pass && ok;
      detail << model.describe() << " r=" << radius << " hausdorff=" << sci(st.focal_error)
             << (model.epsilon() < 0 ? (st.only_minus_r ? " AFR={-r}" : " AFR!={-r}") : "")
             << "; ";
    }
  }
  r.pass = pass;
  r.detail = detail.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

CriterionResult non_constancy() {
  CriterionResult r;
  const AmbientModel model = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const double radius = 0.3;
  const Immersion f = geodesic_sphere(model, f_lag, radius, Domain::sphere(3, 16));
  Param a(3), b(3);
  a << 0.3, 0.7, 1.9;
  b << 1.2, 0.7, 1.9;
  const Vec sa = real_spectrum(surface_sample(f, f_lag, a).aniso_shape).first;
  const Vec sb = real_spectrum(surface_sample(f, f_lag, b).aniso_shape).first;
  const double gap = (sa - sb).cwiseAbs().maxCoeff();
  const auto iso = check_isoparametric(f, f_lag, default_t_grid(radius), spread_nodes(f.domain(), 30));
  r.pass = gap > 1e-3 && iso.max_spread > 1e-3;
  r.detail = "max sorted spectrum gap theta=0.3 vs 1.2: " + sci(gap) +
             ", max spread of H_F over f_t: " + sci(iso.max_spread);
  return r;
}

CriterionResult reflective_tube_check() {
  CriterionResult r;
  const AmbientModel model = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const double radius = 0.4;
  const TubeSpec spec{BaseKind::Factor, 0, radius};
  const Immersion tube = build_tube(model, f_lag, spec, 16);
  const auto nodes = spread_nodes(tube.domain(), 30);
  const auto eq = check_equifocal(tube, f_lag, nodes);
  const auto t_grid = default_t_grid(radius);
  const auto iso = check_isoparametric(tube, f_lag, t_grid, nodes);
  std::vector<double> err(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    // Unit normal of the base factor at the foot point, in base coordinates.
    const Vec y = tube.domain().embed(nodes[i]);
    Vec v = Vec::Zero(model.tangent_dim());
    v(2) = y(3);
    v(3) = y(4);
    const auto cf = closed_form_tube_spectrum(model, spec.factor, f_lag, radius, v);
    const Vec numeric = real_spectrum(surface_sample(tube, f_lag, nodes[i]).aniso_shape).first;
    err[i] = (numeric - cf.eigenvalues).cwiseAbs().maxCoeff();
  });
  const double spec_err = *std::max_element(err.begin(), err.end());
  r.pass = eq.pass && iso.pass && spec_err <= 1e-4;
  r.detail = std::to_string(nodes.size()) + " nodes, " + std::to_string(t_grid.size()) +
             " offsets: equifocal hausdorff=" + sci(eq.max_hausdorff) +
             " isoparametric spread=" + sci(iso.max_spread) + " spectrum err=" + sci(spec_err);
  return r;
}

CriterionResult holonomy_map(std::mt19937_64& rng) {
  CriterionResult r;
  const AmbientModel model = AmbientModel::sphere_product(2, 2);
  const Vec p0 = model.base_point();
  double err = 0.0, parallel = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vec p = random_point(model, rng, 0.2, 2.0);
    const Vec v = random_tangent(model, p, rng);
    const Vec w = random_tangent(model, p0, rng);
    err = std::max(err, (tau_hol(model, p, v, w) - loop_holonomy_derivative(model, p, v, w)).norm());
    const Vec radial = 0.7 * model.geodesic_velocity(p0, model.log(p0, p));
    parallel = std::max(parallel, tau_hol(model, p, radial, w).norm());
  }
  const AmbientModel flat = AmbientModel::euclidean(4);
  double flat_err = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vec p = random_point(flat, rng, 0.2, 2.0);
    flat_err = std::max(flat_err, tau_hol(flat, p, random_tangent(flat, p, rng),
                                          random_tangent(flat, flat.base_point(), rng))
                                      .norm());
  }
  r.pass = err <= 1e-5 && parallel <= 1e-12 && flat_err <= 1e-12;
  r.detail = "S^2xS^2 max|closed form - loop oracle|=" + sci(err) + " over 50, v || c': " +
             sci(parallel) + ", Euclidean: " + sci(flat_err);
  return r;
}

CriterionResult jacobi_propagator(std::mt19937_64& rng) {
  CriterionResult r;
  bool pass = true;
  std::ostringstream detail;
  for (const AmbientModel& model : {AmbientModel::euclidean(4), AmbientModel::sphere_product(2, 2),
                                    AmbientModel::hyperbolic_product(2, 2)}) {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Vec x = random_point(model, rng, 0.0, 1.0);
      const Vec w = random_tangent(model, x, rng);
      const Vec y0 = random_tangent(model, x, rng);
      const Vec y1 = random_tangent(model, x, rng);
      const double s = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      worst = std::max(worst, (propagate_jacobi(model, x, w, y0, y1, s) -
                               jacobi_rk4(model, x, w, y0, y1, s))
                                  .norm());
    }
    pass = pass && worst <= 1e-6;
    detail << model.describe() << " " << sci(worst) << "; ";
  }
  r.pass = pass;
  r.detail = "max|closed form - RK4| over 50 cases: " + detail.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

CriterionResult reconstruction() {
  CriterionResult r;
  const AmbientModel model = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const Immersion sphere = geodesic_sphere(model, f_lag, 0.3, Domain::sphere(3, 16));
  const auto a = reconstruct_from_focal(sphere, f_lag, -0.3, spread_nodes(sphere.domain(), 60));
  const Immersion tube = build_tube(model, f_lag, TubeSpec{BaseKind::Factor, 0, 0.4}, 16);
  const auto b = reconstruct_from_focal(tube, f_lag, -0.4, spread_nodes(tube.domain(), 60));
  r.pass = a.max_distance < 1e-7 && b.max_distance < 1e-7;
  r.detail = "sphere (B=point, rank " + std::to_string(a.collapse_rank) + "): " + sci(a.max_distance) +
             ", tube (B=factor, rank " + std::to_string(b.collapse_rank) + "): " + sci(b.max_distance);
  return r;
}

CriterionResult equifocal_isoparametric() {
  CriterionResult r;
  struct Example {
    std::string name;
    std::function<Immersion()> build;
    Lagrangian lagrangian;
    double radius;
  };
  const AmbientModel flat = AmbientModel::euclidean(3);
  const AmbientModel s2s2 = AmbientModel::sphere_product(2, 2);
  const Lagrangian one2 = Lagrangian::constant(2, 1.0);
  const Lagrangian one3 = Lagrangian::constant(3, 1.0);
  const Lagrangian wulff = wulff_form();
  const Lagrangian prof = profile();
  const std::vector<Example> examples{
      {"round sphere R^3", [&] { return geodesic_sphere(flat, one2, 0.5, Domain::sphere2(24, 24)); }, one2, 0.5},
      {"Wulff sphere R^3", [&] { return geodesic_sphere(flat, wulff, 0.5, Domain::sphere2(24, 24)); }, wulff, 0.5},
      {"torus R^3", [&] { return euclidean_torus(1.0, 0.4, Domain::torus2(24, 24)); }, one2, 0.4},
      {"geodesic sphere S^2xS^2 F=1", [&] { return geodesic_sphere(s2s2, one3, 0.3, Domain::sphere(3, 12)); }, one3, 0.3},
      {"geodesic sphere S^2xS^2", [&] { return geodesic_sphere(s2s2, prof, 0.3, Domain::sphere(3, 12)); }, prof, 0.3},
      {"tube S^2xS^2", [&] { return build_tube(s2s2, prof, TubeSpec{BaseKind::Factor, 0, 0.4}, 12); }, prof, 0.4},
  };
  bool pass = true;
  std::ostringstream detail;
  for (const auto& ex : examples) {
    const Immersion f = ex.build();
    const auto nodes = spread_nodes(f.domain(), 30);
    const bool eq = check_equifocal(f, ex.lagrangian, nodes).pass;
    const bool iso = check_isoparametric(f, ex.lagrangian, default_t_grid(ex.radius), nodes).pass;
    pass = pass && eq == iso;
    detail << ex.name << " " << (eq ? "E" : "e") << (iso ? "I" : "i") << "; ";
  }
  {
    // Outside the non-negative curvature hypothesis, reported only.
    const AmbientModel h2h2 = AmbientModel::hyperbolic_product(2, 2);
    const Immersion f = geodesic_sphere(h2h2, prof, 0.3, Domain::sphere(3, 12));
    const auto nodes = spread_nodes(f.domain(), 30);
    const bool eq = check_equifocal(f, prof, nodes).pass;
    const bool iso = check_isoparametric(f, prof, default_t_grid(0.3), nodes).pass;
    detail << "[not counted: geodesic sphere H^2xH^2 " << (eq ? "E" : "e") << (iso ? "I" : "i") << "]; ";
  }
  r.pass = pass;
  r.detail = "E/e equifocal pass/fail, I/i isoparametric pass/fail: " + detail.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

}  // namespace

std::string acceptance_title(int id) {
  static const char* titles[kAcceptanceCount] = {
      "isotropic reduction",
      "first variational formula",
      "Gauss map identity",
      "geodesic sphere spectrum",
      "focal radii",
      "non-constancy",
      "reflective tube",
      "holonomy map",
      "Jacobi propagator",
      "reconstruction from focal set",
      "equifocal vs isoparametric",
  };
  if (id < 1 || id > kAcceptanceCount) throw UsageError("acceptance: no criterion " + std::to_string(id));
  return titles[id - 1];
}

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  const std::string title = acceptance_title(id);
  std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(id));
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = isotropic_reduction(); break;
      case 2: r = first_variation(rng); break;
      case 3: r = gauss_identity(); break;
      case 4: r = spectrum_oracle(rng); break;
      case 5: r = focal_radii_oracle(rng); break;
      case 6: r = non_constancy(); break;
      case 7: r = reflective_tube_check(); break;
      case 8: r = holonomy_map(rng); break;
      case 9: r = jacobi_propagator(rng); break;
      case 10: r = reconstruction(); break;
      case 11: r = equifocal_isoparametric(); break;
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.title = title;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Runtime budgets.
  if (id == 1 && r.seconds >= 5.0) {
    r.pass = false;
    r.detail += " [over the 5 s budget]";
  }
  if (id == 2 && r.seconds >= 120.0) {
    r.pass = false;
    r.detail += " [over the 120 s budget]";
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::vector<int>& ids) {
  std::vector<int> which = ids;
  if (which.empty())
    for (int id = 1; id <= kAcceptanceCount; ++id) which.push_back(id);
  std::vector<CriterionResult> out;
  for (int id : which) out.push_back(run_criterion(id, options));
  return out;
}

std::string format_result(const CriterionResult& result) {
  std::ostringstream out;
  out << (result.pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << result.id << "] "
      << result.title << ": " << result.detail << " (" << std::fixed << std::setprecision(1)
      << result.seconds << " s)";
  return out.str();
}

}  // namespace aniso
