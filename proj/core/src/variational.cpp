#include "aniso/variational.hpp"

#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace aniso {

namespace {

void exponents_up_to(int dim, int degree, std::vector<int>& current,
                     std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == dim) {
    out.push_back(current);
    return;
  }
  int used = 0;
  for (int e : current) used += e;
  for (int e = 0; e + used <= degree; ++e) {
    current.push_back(e);
    exponents_up_to(dim, degree, current, out);
    current.pop_back();
  }
}

struct GridStats {
  double mean = 0.0;
  double max_abs = 0.0;
  double spread = 0.0;
  double area = 0.0;
};

GridStats mean_curvature_stats(const Domain& domain, const std::vector<SurfaceSample>& samples) {
  GridStats st;
  double weighted = 0.0;
  double lo = samples.front().aniso_mean, hi = lo;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double dv = domain.weight(i) * samples[i].density;
    weighted += dv * samples[i].aniso_mean;
    st.area += dv;
    lo = std::min(lo, samples[i].aniso_mean);
    hi = std::max(hi, samples[i].aniso_mean);
    st.max_abs = std::max(st.max_abs, std::abs(samples[i].aniso_mean));
  }
  st.mean = weighted / st.area;
  st.spread = hi - lo;
  return st;
}

/// Frame at a grid node together with dV/du there.
std::pair<LocalFrame, double> node_frame(const Immersion& f, const Param& u) {
  const LocalChart chart = LocalChart::around(f.domain(), f.domain().embed(u));
  const LocalFrame lf = local_frame(f, chart, Vec::Zero(f.dim()));
  return {lf, lf.sqrt_g * parameter_density(f.domain(), chart, u)};
}

}  // namespace

PolynomialField::PolynomialField(int embed_dim, int degree, int components)
    : embed_dim_(embed_dim), degree_(degree) {
  if (degree < 0) throw UsageError("polynomial field: degree must be non-negative");
  std::vector<int> current;
  exponents_up_to(embed_dim, degree, current, exponents_);
  coefficients_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(exponents_.size()), components);
}

PolynomialField::PolynomialField(const Domain& domain, int degree, int components)
    : PolynomialField(domain.embed_dim(), degree, components) {
  std::vector<std::vector<int>> kept;
  for (const auto& e : exponents_) {
    bool reduced = true;
    for (const auto& [start, len] : domain.factors()) reduced = reduced && e[start + len - 1] <= 1;
    if (reduced) kept.push_back(e);
  }
  exponents_ = std::move(kept);
  coefficients_ = Eigen::MatrixXd::Zero(terms(), components);
}

Eigen::VectorXd PolynomialField::basis(const Vec& y) const {
  Eigen::MatrixXd powers(embed_dim_, degree_ + 1);
  for (int i = 0; i < embed_dim_; ++i) {
    powers(i, 0) = 1.0;
    for (int k = 1; k <= degree_; ++k) powers(i, k) = powers(i, k - 1) * y(i);
  }
  Eigen::VectorXd b(terms());
  for (int t = 0; t < terms(); ++t) {
    double v = 1.0;
    for (int i = 0; i < embed_dim_; ++i) v *= powers(i, exponents_[t][i]);
    b(t) = v;
  }
  return b;
}

Vec PolynomialField::eval(const Vec& y) const {
  const Eigen::VectorXd b = basis(y);
  return Vec(coefficients_.transpose() * b);
}

PolynomialField PolynomialField::fit(const Domain& domain, const std::vector<Vec>& values,
                                     int degree) {
  if (values.size() != domain.node_count() || values.empty()) {
    throw UsageError("polynomial fit: one value per grid node is required");
  }
  PolynomialField field(domain, degree, static_cast<int>(values.front().size()));
  Eigen::MatrixXd phi(values.size(), field.terms());
  Eigen::MatrixXd rhs(values.size(), values.front().size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    phi.row(static_cast<Eigen::Index>(i)) = field.basis(domain.embed(domain.node(i))).transpose();
    rhs.row(static_cast<Eigen::Index>(i)) = values[i].transpose();
  }
  field.coefficients_ = phi.colPivHouseholderQr().solve(rhs);
  return field;
}

Vec tangent_components(const Domain& domain, const Variation& variation, const LocalChart& chart,
                       const Vec& s) {
  if (!variation.tangent) return Vec::Zero(domain.dim());
  const Mat j = chart.jacobian(domain, s);
  const Vec k = variation.tangent(chart.at(domain, s));
  return Mat(j.transpose() * j).ldlt().solve(Vec(j.transpose() * k));
}

double integrate(const Immersion& f, const std::function<double(const Vec&)>& psi) {
  const Domain& d = f.domain();
  std::vector<double> parts(d.node_count());
  parallel_for(parts.size(), [&](std::size_t i) {
    const Param u = d.node(i);
    parts[i] = d.weight(i) * node_frame(f, u).second * psi(d.embed(u));
  });
  double sum = 0.0;
  for (double p : parts) sum += p;
  return sum;
}

double area(const Immersion& f) {
  return integrate(f, [](const Vec&) { return 1.0; });
}

Variation mean_zero(const Immersion& f, Variation variation) {
  const double mean = integrate(f, variation.psi) / area(f);
  auto psi = variation.psi;
  variation.psi = [psi, mean](const Vec& y) { return psi(y) - mean; };
  return variation;
}

Variation random_variation(const Immersion& f, std::mt19937_64& rng, bool mean_zero_psi,
                           bool with_tangent) {
  const Domain& d = f.domain();
  const int m = d.embed_dim();
  std::normal_distribution<double> normal;
  const double c0 = normal(rng);
  Eigen::VectorXd c1(m);
  Eigen::MatrixXd c2(m, m);
  for (int i = 0; i < m; ++i) c1(i) = normal(rng);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) c2(i, j) = 0.5 * normal(rng);
  Variation variation;
  variation.psi = [c0, c1, c2](const Vec& y) {
    const Eigen::VectorXd yy = y;
    return c0 + c1.dot(yy) + yy.dot(c2 * yy);
  };
  if (with_tangent) {
    Eigen::VectorXd a(m);
    Eigen::MatrixXd b(m, m);
    for (int i = 0; i < m; ++i) a(i) = 0.5 * normal(rng);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) b(i, j) = 0.5 * normal(rng);
    variation.tangent = [d, a, b](const Vec& y) {
      const Eigen::VectorXd yy = y;
      return d.project_tangent(y, Vec(a + b * yy));
    };
  }
  return mean_zero_psi ? mean_zero(f, std::move(variation)) : variation;
}

double energy(const Immersion& f, const Lagrangian& lagrangian) {
  const Domain& d = f.domain();
  const AmbientModel& model = f.model();
  std::vector<double> parts(d.node_count());
  parallel_for(parts.size(), [&](std::size_t i) {
    const auto [lf, density] = node_frame(f, d.node(i));
    parts[i] = d.weight(i) * density * lagrangian.eval(gauss_image(model, lf.point, lf.normal));
  });
  double sum = 0.0;
  for (double p : parts) sum += p;
  return sum;
}

std::vector<FirstVariationReport> verify_first_variation(const Immersion& f,
                                                         const Lagrangian& lagrangian,
                                                         const std::vector<Variation>& variations,
                                                         const FirstVariationOptions& options) {
  const Domain& d = f.domain();
  const AmbientModel& model = f.model();
  const int n = f.dim();
  const std::size_t nodes = d.node_count();
  const std::size_t nv = variations.size();
  double h = options.step;
  for (int attempt = 0; attempt <= options.retries; ++attempt, h *= 0.5) {
    const double offsets[4] = {-2.0 * h, -h, h, 2.0 * h};
    std::vector<double> formula(nodes * nv, 0.0);
    std::vector<double> energies(nodes * nv * 4, 0.0);
    std::atomic<bool> degenerate{false};
    parallel_for(nodes, [&](std::size_t i) {
      if (degenerate) return;
      const Param u = d.node(i);
      const LocalChart chart = LocalChart::around(d, d.embed(u));
      const double w = d.weight(i) * parameter_density(d, chart, u);
      const auto pts = stencil_points(Vec(Vec::Zero(n)), f.step());
      const std::vector<LocalFrame> frames = stencil_frames(f, chart);
      const SurfaceSample s = assemble_sample(f, lagrangian, frames);
      // Left inverses of dy/ds: tangent fields on M to chart components.
      std::vector<Mat> pullback(pts.size());
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const Mat jac = chart.jacobian(d, pts[k]);
        pullback[k] = Mat(jac.transpose() * jac).inverse() * jac.transpose();
      }
      std::vector<Vec> field(pts.size()), moved(pts.size());
      for (std::size_t j = 0; j < nv; ++j) {
        const Variation& var = variations[j];
        formula[i * nv + j] = -w * var.psi(frames[0].y) * s.aniso_mean * s.sqrt_g;
        for (std::size_t k = 0; k < pts.size(); ++k) {
          field[k] = var.psi(frames[k].y) * frames[k].normal;
          if (var.tangent) field[k] += frames[k].frame * (pullback[k] * var.tangent(frames[k].y));
        }
        for (int ti = 0; ti < 4; ++ti) {
          const double t = offsets[ti];
          for (std::size_t k = 0; k < pts.size(); ++k) moved[k] = model.exp(frames[k].point, t * field[k]);
          Mat frame(model.embed_dim(), n);
          for (int c = 0; c < n; ++c) {
            frame.col(c) = model.project_tangent(moved[0], stencil_derivative(moved, c, f.step()));
          }
          Mat g = frame.transpose() * model.metric_signs().asDiagonal() * frame;
          const double det = g.determinant();
          Eigen::SelfAdjointEigenSolver<Mat> eig(g, Eigen::EigenvaluesOnly);
          if (!(eig.eigenvalues()(0) > 0.0) ||
              !(eig.eigenvalues()(n - 1) < 1e12 * eig.eigenvalues()(0))) {
            degenerate = true;
            return;
          }
          const Vec ref = model.transport_along(frames[0].point, t * field[0], frames[0].normal);
          const Vec xi = unit_normal(model, moved[0], frame, ref);
          const double value = lagrangian.eval(gauss_image(model, moved[0], xi));
          energies[(i * nv + j) * 4 + ti] = w * value * std::sqrt(det);
        }
      }
    });
    if (degenerate) continue;
    std::vector<FirstVariationReport> reports(nv);
    for (std::size_t j = 0; j < nv; ++j) {
      double e[4] = {0, 0, 0, 0};
      double form = 0.0;
      for (std::size_t i = 0; i < nodes; ++i) {
        for (int ti = 0; ti < 4; ++ti) e[ti] += energies[(i * nv + j) * 4 + ti];
        form += formula[i * nv + j];
      }
      const double d1 = (e[2] - e[1]) / (2.0 * h);
      const double d2 = (e[3] - e[0]) / (4.0 * h);
      FirstVariationReport& r = reports[j];
      r.fd_derivative = (4.0 * d1 - d2) / 3.0;
      r.formula_value = form;
      r.abs_error = std::abs(r.fd_derivative - r.formula_value);
      const double scale = std::max(std::abs(r.fd_derivative), std::abs(r.formula_value));
      r.rel_error = scale > 0.0 ? r.abs_error / scale : 0.0;
      r.step = h;
    }
    return reports;
  }
  throw NumericError("first variation: displaced surface is not immersed even at step " +
                     std::to_string(h));
}

CriticalPointReport verify_critical_point(const Immersion& f, const Lagrangian& lagrangian,
                                          CriticalMode mode, int count, std::mt19937_64& rng,
                                          double tolerance) {
  const Domain& d = f.domain();
  const auto samples = sample_all(f, lagrangian);
  const GridStats st = mean_curvature_stats(d, samples);
  const bool preserving = mode == CriticalMode::VolumePreserving;

  // psi proportional to the fluctuation of H_F, scaled to unit amplitude.
  std::vector<Vec> values;
  double amplitude = 0.0;
  for (const auto& s : samples) {
    Vec v(1);
    v(0) = s.aniso_mean - (preserving ? st.mean : 0.0);
    amplitude = std::max(amplitude, std::abs(v(0)));
    values.push_back(v);
  }
  if (amplitude > 0.0)
    for (Vec& v : values) v /= amplitude;
  std::vector<Variation> variations;
  {
    const PolynomialField fitted = PolynomialField::fit(d, values, 4);
    Variation aligned;
    aligned.psi = [fitted](const Vec& y) { return fitted.eval(y)(0); };
    variations.push_back(preserving ? mean_zero(f, aligned) : aligned);
  }
  for (int k = 0; k < count; ++k) variations.push_back(random_variation(f, rng, preserving));

  CriticalPointReport report;
  report.mode = mode;
  report.max_abs_mean = st.max_abs;
  report.spread = st.spread;
  for (const auto& r : verify_first_variation(f, lagrangian, variations)) {
    report.derivatives.push_back(r.fd_derivative);
    report.max_derivative = std::max(report.max_derivative, std::abs(r.fd_derivative));
  }
  report.critical_by_derivative = report.max_derivative <= tolerance;
  const double pointwise = preserving ? st.spread : st.max_abs;
  report.critical_by_curvature = pointwise * st.area <= tolerance;
  report.consistent = report.critical_by_derivative == report.critical_by_curvature;
  return report;
}

FlowReport gradient_flow(const Immersion& f, const Lagrangian& lagrangian, const FlowOptions& options) {
  if (options.steps < 0) throw UsageError("flow: steps must be non-negative");
  if (options.dt < 0.0) throw UsageError("flow: dt must be non-negative");
  const Domain& d = f.domain();
  const AmbientModel& model = f.model();
  const std::size_t nodes = d.node_count();

  std::vector<Vec> reference(nodes);
  PolynomialField field(d, options.degree, model.embed_dim());
  Eigen::MatrixXd phi(nodes, field.terms());
  for (std::size_t i = 0; i < nodes; ++i) {
    const Param u = d.node(i);
    reference[i] = f.point(u);
    phi.row(static_cast<Eigen::Index>(i)) = field.basis(d.embed(u)).transpose();
  }
  const auto solver = phi.colPivHouseholderQr();

  auto make = [&](const PolynomialField& displacement) {
    auto chart = [f, model, displacement](const Vec& y) {
      return model.project_point(f.point_at(y) + displacement.eval(y));
    };
    auto orient = [f](const Vec& y, const Vec& x) { return f.orientation(y, x); };
    return Immersion(model, d, chart, orient, f.step());
  };

  FlowReport report;
  Immersion current = make(field);
  double e = energy(current, lagrangian);
  FlowStep initial;
  initial.energy = e;
  report.trajectory.push_back(initial);

  for (int step = 1; step <= options.steps + 1; ++step) {
    const auto samples = sample_all(current, lagrangian);
    const GridStats st = mean_curvature_stats(d, samples);
    report.trajectory.back().max_abs_mean = st.max_abs;
    report.trajectory.back().spread = st.spread;
    if (step > options.steps) break;

    FlowStep record;
    record.step = step;
    double dt = options.dt;
    if (dt == 0.0) {
      record.energy = e;
      report.trajectory.push_back(record);
      continue;
    }
    const double shift = options.mode == CriticalMode::VolumePreserving ? st.mean : 0.0;
    for (;;) {
      Eigen::MatrixXd targets(nodes, model.embed_dim());
      for (std::size_t i = 0; i < nodes; ++i) {
        const SurfaceSample& s = samples[i];
        const Vec moved = model.exp(s.point, dt * (s.aniso_mean - shift) * s.xi);
        targets.row(static_cast<Eigen::Index>(i)) = (moved - reference[i]).transpose();
      }
      PolynomialField next = field;
      next.coefficients() = solver.solve(targets);
      Immersion candidate = make(next);
      const double e_next = energy(candidate, lagrangian);
      if (e_next <= e + 1e-12 * std::abs(e)) {
        if (e_next > e) report.monotone = false;
        field = next;
        current = candidate;
        e = e_next;
        break;
      }
      dt *= 0.5;
      if (++record.rejections > options.max_halvings) {
        throw NumericError("flow stalled: energy increased after " +
                           std::to_string(options.max_halvings) + " step halvings");
      }
    }
    record.dt = dt;
    record.energy = e;
    report.trajectory.push_back(record);
  }
  return report;
}

}  // namespace aniso
