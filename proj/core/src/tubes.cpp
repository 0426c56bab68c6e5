#include "aniso/tubes.hpp"

#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aniso {

namespace {

void require_lagrangian(const AmbientModel& model, const Lagrangian& lagrangian) {
  if (lagrangian.ambient_dim() != model.tangent_dim()) {
    throw UsageError("Lagrangian lives on S^" + std::to_string(lagrangian.dimension()) +
                     " but " + model.describe() + " needs S^" +
                     std::to_string(model.tangent_dim() - 1));
  }
}

Vec wulff_vector(const Lagrangian& lagrangian, const Vec& v) {
  return lagrangian.eval(v) * v + lagrangian.gradient(v);
}

// -x / tan(r x) continued in x^2 = eps alpha^2; the principal curvature of a root direction.
double cotangent_curvature(int eps, double alpha, double r) {
  const double x = std::abs(alpha);
  if (eps == 0 || x * r < 1e-8) return -1.0 / r;
  if (eps > 0) {
    if (std::abs(r * x - 0.5 * kPi) < 1e-15) return 0.0;
    return -x / std::tan(r * x);
  }
  return -x / std::tanh(r * x);
}

// x tan(r x) continued the same way; horizontal directions of a tube.
double tangent_curvature(int eps, double alpha, double r) {
  const double x = std::abs(alpha);
  if (eps == 0 || x == 0.0) return 0.0;
  if (eps > 0) return x * std::tan(r * x);
  return -x * std::tanh(r * x);
}

void add_root(std::vector<FocalRoot>& roots, double s, int multiplicity, const FocalSearch& search) {
  if (s < search.lo || s > search.hi || multiplicity <= 0) return;
  for (FocalRoot& existing : roots) {
    if (std::abs(existing.s - s) < 1e-9) {
      existing.multiplicity += multiplicity;
      return;
    }
  }
  roots.push_back({s, multiplicity});
}

void add_family(std::vector<FocalRoot>& roots, double first, double period, int multiplicity,
                const FocalSearch& search) {
  const int jlo = static_cast<int>(std::floor((search.lo - first) / period)) - 1;
  const int jhi = static_cast<int>(std::ceil((search.hi - first) / period)) + 1;
  for (int j = jlo; j <= jhi; ++j) add_root(roots, first + j * period, multiplicity, search);
}

void sort_roots(std::vector<FocalRoot>& roots) {
  std::sort(roots.begin(), roots.end(),
            [](const FocalRoot& a, const FocalRoot& b) { return a.s < b.s; });
}

}  // namespace

void check_radius_bound(const AmbientModel& model, const Lagrangian& lagrangian, double radius) {
  if (!(radius > 0.0)) throw UsageError("radius must be positive");
  if (model.epsilon() <= 0) return;
  const double bound = model.conjugate_radius() / (2.0 * max_wulff_radius(lagrangian));
  if (!(radius < bound)) {
    throw RadiusBoundError("radius " + std::to_string(radius) + " violates the bound " +
                           std::to_string(bound));
  }
}

Immersion geodesic_sphere(const AmbientModel& model, const Lagrangian& lagrangian, double radius,
                          const Domain& domain, double step) {
  require_lagrangian(model, lagrangian);
  check_radius_bound(model, lagrangian, radius);
  if (domain.factors().size() != 1 || domain.embed_dim() != model.tangent_dim()) {
    throw UsageError("geodesic sphere: domain must be the unit sphere of T_{p0}M");
  }
  const Vec p0 = model.base_point();
  auto chart = [model, lagrangian, radius, p0](const Vec& v) {
    return model.exp(p0, model.from_base(radius * wulff_vector(lagrangian, v)));
  };
  auto orient = [model, lagrangian, radius, p0](const Vec& v, const Vec&) {
    return model.geodesic_velocity(p0, model.from_base(radius * wulff_vector(lagrangian, v)));
  };
  return Immersion(model, domain, chart, orient, step);
}

Immersion reflective_tube(const AmbientModel& model, const Lagrangian& lagrangian, int factor,
                          double radius, const Domain& domain, double step) {
  require_lagrangian(model, lagrangian);
  if (model.kind() != ModelKind::SphereProduct || model.p() != 2 || model.q() != 2) {
    throw UsageError("reflective tube: implemented for the factors of S^2 x S^2");
  }
  if (factor != 0 && factor != 1) throw UsageError("reflective tube: factor must be 0 or 1");
  if (domain.kind() != DomainKind::Sphere2Circle) {
    throw UsageError("reflective tube: domain must be S^2 x S^1 (base x normal circle)");
  }
  check_radius_bound(model, lagrangian, radius);
  const auto [bstart, blen] = model.factor_range(factor);
  const auto [nstart, nlen] = model.factor_range(1 - factor);
  (void)blen;
  (void)nlen;
  const Vec p0 = model.base_point();

  // Base point on B and the unit normal (0, omega) there, in embedding coordinates.
  auto base_and_normal = [=](const Vec& y) {
    Vec b = p0;
    b.segment(bstart, 3) = y.head(3);
    Vec normal = Vec::Zero(model.embed_dim());
    normal(nstart + 1) = y(3);
    normal(nstart + 2) = y(4);
    return std::pair{b, normal};
  };
  // F restricted to the unit normal bundle must be constant.
  {
    const double ref = lagrangian.eval(gauss_image(model, p0, base_and_normal(domain.embed(domain.node(0))).second));
    const std::size_t count = domain.node_count();
    const std::size_t stride = std::max<std::size_t>(1, count / 64);
    for (std::size_t i = 0; i < count; i += stride) {
      const auto [b, normal] = base_and_normal(domain.embed(domain.node(i)));
      const double value = lagrangian.eval(gauss_image(model, b, normal));
      if (std::abs(value - ref) > 1e-12) {
        throw InvarianceError("reflective tube: F is not constant on the unit normal bundle");
      }
    }
  }
  auto endpoint_velocity = [=](const Vec& y) {
    const auto [b, normal] = base_and_normal(y);
    const Vec nu = gauss_image(model, b, normal);
    const Vec direction = model.transport(p0, b, model.from_base(wulff_vector(lagrangian, nu)));
    return std::pair{b, Vec(radius * direction)};
  };
  auto chart = [=](const Vec& y) {
    const auto [b, v] = endpoint_velocity(y);
    return model.exp(b, v);
  };
  auto orient = [=](const Vec& y, const Vec&) {
    const auto [b, v] = endpoint_velocity(y);
    return model.geodesic_velocity(b, v);
  };
  return Immersion(model, domain, chart, orient, step);
}

Domain tube_domain(const AmbientModel& model, const TubeSpec& spec, int resolution) {
  if (spec.base == BaseKind::Factor) return Domain::sphere2_circle(resolution, resolution, resolution);
  return Domain::sphere(model.tangent_dim() - 1, resolution);
}

Immersion build_tube(const AmbientModel& model, const Lagrangian& lagrangian, const TubeSpec& spec,
                     int resolution, double step) {
  const Domain domain = tube_domain(model, spec, resolution);
  if (spec.base == BaseKind::Factor) {
    return reflective_tube(model, lagrangian, spec.factor, spec.radius, domain, step);
  }
  return geodesic_sphere(model, lagrangian, spec.radius, domain, step);
}

Immersion parallel_hypersurface(const Immersion& f, const Lagrangian& lagrangian, double t,
                                bool check) {
  if (t == 0.0) return f;
  const AmbientModel model = f.model();
  auto displacement = [f, lagrangian, model, t](const Vec& y) {
    const LocalFrame lf = local_frame_at(f, y);
    const AnisotropicVector a = anisotropic_vector(model, lagrangian, lf.point, lf.normal);
    return std::pair{lf.point, Vec(t * a.xi_f)};
  };
  auto chart = [displacement, model](const Vec& y) {
    const auto [x, v] = displacement(y);
    return model.exp(x, v);
  };
  auto orient = [displacement, model, t](const Vec& y, const Vec&) {
    const auto [x, v] = displacement(y);
    return Vec(model.geodesic_velocity(x, v) / t);
  };
  Immersion ft(model, f.domain(), chart, orient, f.step());
  if (check) {
    const Domain& d = ft.domain();
    parallel_for(d.node_count(), [&](std::size_t i) {
      double condition = std::numeric_limits<double>::infinity();
      try {
        condition = local_frame_at(ft, d.embed(d.node(i))).condition;
      } catch (const NumericError&) {
      }
      if (!(condition < 1e6)) {
        throw FocalDegenerateError("parallel hypersurface loses rank at offset " + std::to_string(t), t);
      }
    });
  }
  return ft;
}

ClosedFormReport closed_form_sphere_spectrum(const AmbientModel& model, const Lagrangian& lagrangian,
                                             double radius, const Vec& v,
                                             const FocalSearch& search) {
  require_lagrangian(model, lagrangian);
  const int n = model.tangent_dim() - 1;
  const int eps = model.epsilon();
  ClosedFormReport report;
  report.xi_bar = wulff_vector(lagrangian, v);
  std::vector<double> eig;
  int used = 0;
  add_root(report.afr, -radius, n, search);
  if (model.kind() != ModelKind::Euclidean) {
    const Vec p0 = model.base_point();
    const Vec xi = model.from_base(report.xi_bar);
    const RootData data = root_data(model, p0, xi);
    for (const Root& root : data.roots) {
      const double alpha = std::abs(root(data.abelian, xi, model));
      report.root_values.push_back(alpha);
      for (int k = 0; k < root.multiplicity; ++k) eig.push_back(cotangent_curvature(eps, alpha, radius));
      used += root.multiplicity;
      if (eps > 0 && alpha > 1e-12) add_family(report.afr, -radius, kPi / alpha, root.multiplicity, search);
    }
  }
  for (int k = used; k < n; ++k) eig.push_back(-1.0 / radius);
  // -r itself was counted once per direction above; undo the double count from the families.
  for (FocalRoot& root : report.afr) {
    if (std::abs(root.s + radius) < 1e-9) root.multiplicity = n;
  }
  std::sort(eig.begin(), eig.end());
  report.eigenvalues = Eigen::Map<Vec>(eig.data(), static_cast<int>(eig.size()));
  sort_roots(report.afr);
  return report;
}

ClosedFormReport closed_form_tube_spectrum(const AmbientModel& model, int factor,
                                           const Lagrangian& lagrangian, double radius,
                                           const Vec& v, const FocalSearch& search) {
  require_lagrangian(model, lagrangian);
  if (model.kind() == ModelKind::Euclidean) {
    throw UsageError("tube spectrum: needs a product model");
  }
  const int eps = model.epsilon();
  ClosedFormReport report;
  report.xi_bar = wulff_vector(lagrangian, v);
  const Vec p0 = model.base_point();
  const Vec xi = model.from_base(report.xi_bar);
  const RootData data = root_data(model, p0, xi, ReflectiveFactor{factor});
  std::vector<double> eig;
  int vertical_total = 0;
  for (const Root& root : data.roots) {
    const double alpha = std::abs(root(data.abelian, xi, model));
    report.root_values.push_back(alpha);
    const int vertical = static_cast<int>(root.vertical.cols());
    const int horizontal = static_cast<int>(root.horizontal.cols());
    for (int k = 0; k < vertical; ++k) eig.push_back(cotangent_curvature(eps, alpha, radius));
    for (int k = 0; k < horizontal; ++k) eig.push_back(tangent_curvature(eps, alpha, radius));
    vertical_total += vertical;
    if (eps > 0) {
      if (alpha > 1e-12) {
        add_family(report.afr, -radius, kPi / alpha, vertical, search);
        add_family(report.afr, -radius + kPi / (2.0 * alpha), kPi / alpha, horizontal, search);
      } else {
        add_root(report.afr, -radius, vertical, search);
      }
    }
  }
  for (int k = 0; k < data.abelian_horizontal.cols(); ++k) eig.push_back(0.0);
  if (eps < 0) add_root(report.afr, -radius, vertical_total, search);
  std::sort(eig.begin(), eig.end());
  report.eigenvalues = Eigen::Map<Vec>(eig.data(), static_cast<int>(eig.size()));
  sort_roots(report.afr);
  return report;
}

FocalSample focal_sample(const SurfaceSample& s) {
  return FocalSample{s.point, s.frame, s.aniso_shape, s.xi, s.xi_f};
}

std::vector<double> root_values(const FocalRadiiReport& report) {
  std::vector<double> out;
  for (const FocalRoot& r : report.roots) out.push_back(r.s);
  return out;
}

std::vector<Param> spread_nodes(const Domain& domain, std::size_t count) {
  // Additive recurrence with the generalized golden ratio; deterministic and well spread.
  static constexpr double kSteps[3] = {0.7548776662466927, 0.5698402909980532, 0.4301597090019468};
  std::vector<Param> out;
  const auto shape = domain.shape();
  for (std::size_t k = 0; k < count; ++k) {
    Param u(domain.dim());
    for (int d = 0; d < domain.dim(); ++d) {
      double frac = 0.5 + static_cast<double>(k) * kSteps[d % 3];
      frac -= std::floor(frac);
      const int i = std::min(shape[d] - 1, static_cast<int>(frac * shape[d]));
      u(d) = domain.axis(d).nodes[i];
    }
    out.push_back(u);
  }
  return out;
}

std::vector<double> default_t_grid(double radius) {
  std::vector<double> grid;
  for (int i = 0; i < 7; ++i) grid.push_back(-0.5 * radius + radius * i / 6.0);
  return grid;
}

EquifocalReport check_equifocal(const Immersion& f, const Lagrangian& lagrangian,
                                const std::vector<Param>& nodes, const FocalSearch& search,
                                double threshold) {
  EquifocalReport report;
  report.sets.resize(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const SurfaceSample s = surface_sample(f, lagrangian, nodes[i]);
    report.sets[i] = root_values(focal_radii(f.model(), focal_sample(s), search));
  });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      report.max_hausdorff = std::max(report.max_hausdorff, hausdorff(report.sets[i], report.sets[j]));
    }
  }
  report.pass = report.max_hausdorff <= threshold;
  return report;
}

IsoparametricReport check_isoparametric(const Immersion& f, const Lagrangian& lagrangian,
                                        const std::vector<double>& t_grid,
                                        const std::vector<Param>& nodes, double threshold) {
  IsoparametricReport report;
  report.t_grid = t_grid;
  for (double t : t_grid) {
    const Immersion ft = parallel_hypersurface(f, lagrangian, t, false);
    std::vector<double> h(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
      const LocalFrame lf = local_frame_at(ft, ft.domain().embed(nodes[i]));
      if (!(lf.condition < 1e6)) {
        throw FocalDegenerateError("parallel hypersurface loses rank at offset " + std::to_string(t), t);
      }
      h[i] = surface_sample(ft, lagrangian, nodes[i]).aniso_mean;
    });
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    report.spread.push_back(*hi - *lo);
    report.max_spread = std::max(report.max_spread, *hi - *lo);
  }
  report.pass = report.max_spread <= threshold;
  return report;
}

CurvatureConstancyReport check_constant_principal_curvatures(const Immersion& f,
                                                             const Lagrangian& lagrangian,
                                                             const std::vector<Param>& nodes,
                                                             double threshold) {
  CurvatureConstancyReport report;
  std::vector<Vec> spectra(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    spectra[i] = real_spectrum(surface_sample(f, lagrangian, nodes[i]).aniso_shape).first;
  });
  for (const Vec& s : spectra) {
    report.max_spread = std::max(report.max_spread, (s - spectra.front()).cwiseAbs().maxCoeff());
  }
  report.pass = report.max_spread <= threshold;
  return report;
}

EmbeddingReport check_embedded(const Immersion& f, double threshold) {
  const Domain& d = f.domain();
  std::vector<Vec> pts(d.node_count());
  parallel_for(pts.size(), [&](std::size_t i) { pts[i] = f.point(d.node(i)); });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, (pts[i] - pts[j]).norm());
  }
  return EmbeddingReport{best, best > threshold};
}

ReconstructionReport reconstruct_from_focal(const Immersion& f, const Lagrangian& lagrangian,
                                            double offset, const std::vector<Param>& nodes,
                                            double rank_tolerance) {
  const AmbientModel& model = f.model();
  const int n = f.dim();
  const Immersion collapsed = parallel_hypersurface(f, lagrangian, offset, false);
  const Vec p0 = model.base_point();
  const Mat gdiag = model.metric_signs().asDiagonal();

  std::vector<int> ranks(nodes.size());
  std::vector<Vec> original(nodes.size()), rebuilt(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const Param& u = nodes[i];
    const LocalChart chart = LocalChart::around(f.domain(), f.domain().embed(u));
    const LocalFrame lf = local_frame(f, chart, Vec::Zero(n));
    // Rank of the collapsed map, measured against the frame of f.
    std::vector<Vec> pts;
    for (const Vec& y : stencil_points(f.domain(), chart, Vec::Zero(n), f.step())) {
      pts.push_back(collapsed.point_at(y));
    }
    const Mat e = model.tangent_frame(pts[0]);
    Mat dc(e.cols(), n);
    for (int k = 0; k < n; ++k) {
      dc.col(k) = e.transpose() * gdiag * model.project_tangent(pts[0], stencil_derivative(pts, k, f.step()));
    }
    const double scale = Eigen::JacobiSVD<Mat>(Mat(model.tangent_frame(lf.point).transpose() * gdiag * lf.frame))
                             .singularValues()(0);
    const Vec sv = Eigen::JacobiSVD<Mat>(dc).singularValues();
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k)
      if (sv(k) > rank_tolerance * scale) ++rank;
    ranks[i] = rank;

    const AnisotropicVector a = anisotropic_vector(model, lagrangian, lf.point, lf.normal);
    const Vec b = model.exp(lf.point, offset * a.xi_f);
    const Vec velocity = model.transport_along(lf.point, offset * a.xi_f, a.xi_f);
    Vec wbar = model.kind() == ModelKind::Euclidean ? velocity
                                                     : model.to_base(model.transport(b, p0, velocity));
    const Vec v = wulff_normal(lagrangian, wbar);
    const Vec xi_bar = lagrangian.eval(v) * v + lagrangian.gradient(v);
    const Vec direction = model.kind() == ModelKind::Euclidean
                              ? xi_bar
                              : model.transport(p0, b, model.from_base(xi_bar));
    original[i] = lf.point;
    rebuilt[i] = model.exp(b, -offset * direction);
  });
  ReconstructionReport report;
  report.offset = offset;
  report.nodes = nodes.size();
  report.collapse_rank = ranks.empty() ? 0 : ranks.front();
  for (int r : ranks) {
    if (r != report.collapse_rank || r >= n) {
      throw NotFocalError("offset " + std::to_string(offset) +
                          " is not focal: the collapsed map has rank " + std::to_string(r) +
                          " (n = " + std::to_string(n) + ")");
    }
  }
  for (const Vec& x : original) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& y : rebuilt) best = std::min(best, (x - y).norm());
    report.max_distance = std::max(report.max_distance, best);
  }
  return report;
}

}  // namespace aniso
