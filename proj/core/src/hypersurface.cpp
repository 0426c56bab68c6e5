#include "aniso/hypersurface.hpp"

#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace aniso {

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Sphere2: return "sphere2";
    case DomainKind::Sphere3: return "sphere3";
    case DomainKind::Torus2: return "torus2";
    case DomainKind::Sphere2Circle: return "sphere2-circle";
  }
  return "unknown";
}

Domain Domain::sphere2(int polar, int azimuth) {
  return Domain(DomainKind::Sphere2,
                {gauss_legendre(polar, 0.0, kPi), periodic_trapezoid(azimuth, 0.0, 2.0 * kPi)});
}

Domain Domain::sphere3(int theta, int a, int b) {
  return Domain(DomainKind::Sphere3,
                {gauss_legendre(theta, 0.0, 0.5 * kPi), periodic_trapezoid(a, 0.0, 2.0 * kPi),
                 periodic_trapezoid(b, 0.0, 2.0 * kPi)});
}

Domain Domain::torus2(int a, int b) {
  return Domain(DomainKind::Torus2,
                {periodic_trapezoid(a, 0.0, 2.0 * kPi), periodic_trapezoid(b, 0.0, 2.0 * kPi)});
}

Domain Domain::sphere2_circle(int polar, int azimuth, int b) {
  return Domain(DomainKind::Sphere2Circle,
                {gauss_legendre(polar, 0.0, kPi), periodic_trapezoid(azimuth, 0.0, 2.0 * kPi),
                 periodic_trapezoid(b, 0.0, 2.0 * kPi)});
}

Domain Domain::sphere(int dim, int resolution) {
  if (dim == 2) return sphere2(resolution, resolution);
  if (dim == 3) return sphere3(resolution, resolution, resolution);
  throw UsageError("sphere domain: only S^2 and S^3 charts are available (got S^" +
                   std::to_string(dim) + ")");
}

int Domain::embed_dim() const {
  switch (kind_) {
    case DomainKind::Sphere2: return 3;
    case DomainKind::Sphere3: return 4;
    case DomainKind::Torus2: return 4;
    case DomainKind::Sphere2Circle: return 5;
  }
  return 0;
}

Domain::Domain(DomainKind kind, std::vector<QuadratureRule> axes)
    : kind_(kind), axes_(std::move(axes)) {
  switch (kind_) {
    case DomainKind::Sphere2: factors_ = {{0, 3}}; break;
    case DomainKind::Sphere3: factors_ = {{0, 4}}; break;
    case DomainKind::Torus2: factors_ = {{0, 2}, {2, 2}}; break;
    case DomainKind::Sphere2Circle: factors_ = {{0, 3}, {3, 2}}; break;
  }
}

Vec Domain::embed(const Param& u) const {
  Vec y(embed_dim());
  switch (kind_) {
    case DomainKind::Sphere2:
    case DomainKind::Sphere2Circle:
      y(0) = std::sin(u(0)) * std::cos(u(1));
      y(1) = std::sin(u(0)) * std::sin(u(1));
      y(2) = std::cos(u(0));
      if (kind_ == DomainKind::Sphere2Circle) {
        y(3) = std::cos(u(2));
        y(4) = std::sin(u(2));
      }
      break;
    case DomainKind::Sphere3:
      y(0) = std::cos(u(0)) * std::cos(u(1));
      y(1) = std::cos(u(0)) * std::sin(u(1));
      y(2) = std::sin(u(0)) * std::cos(u(2));
      y(3) = std::sin(u(0)) * std::sin(u(2));
      break;
    case DomainKind::Torus2:
      y(0) = std::cos(u(0));
      y(1) = std::sin(u(0));
      y(2) = std::cos(u(1));
      y(3) = std::sin(u(1));
      break;
  }
  return y;
}

Mat Domain::embed_jacobian(const Param& u) const {
  Mat j = Mat::Zero(embed_dim(), dim());
  switch (kind_) {
    case DomainKind::Sphere2:
    case DomainKind::Sphere2Circle: {
      const double st = std::sin(u(0)), ct = std::cos(u(0));
      const double sp = std::sin(u(1)), cp = std::cos(u(1));
      j(0, 0) = ct * cp;
      j(1, 0) = ct * sp;
      j(2, 0) = -st;
      j(0, 1) = -st * sp;
      j(1, 1) = st * cp;
      if (kind_ == DomainKind::Sphere2Circle) {
        j(3, 2) = -std::sin(u(2));
        j(4, 2) = std::cos(u(2));
      }
      break;
    }
    case DomainKind::Sphere3: {
      const double st = std::sin(u(0)), ct = std::cos(u(0));
      j(0, 0) = -st * std::cos(u(1));
      j(1, 0) = -st * std::sin(u(1));
      j(2, 0) = ct * std::cos(u(2));
      j(3, 0) = ct * std::sin(u(2));
      j(0, 1) = -ct * std::sin(u(1));
      j(1, 1) = ct * std::cos(u(1));
      j(2, 2) = -st * std::sin(u(2));
      j(3, 2) = st * std::cos(u(2));
      break;
    }
    case DomainKind::Torus2:
      j(0, 0) = -std::sin(u(0));
      j(1, 0) = std::cos(u(0));
      j(2, 1) = -std::sin(u(1));
      j(3, 1) = std::cos(u(1));
      break;
  }
  return j;
}

Vec Domain::project_tangent(const Vec& y, const Vec& w) const {
  Vec out = w;
  for (const auto& [start, len] : factors()) {
    const double c = w.segment(start, len).dot(y.segment(start, len));
    out.segment(start, len) -= c * y.segment(start, len);
  }
  return out;
}

Vec Domain::project_point(const Vec& z) const {
  Vec y = z;
  for (const auto& [start, len] : factors()) y.segment(start, len).normalize();
  return y;
}

LocalChart LocalChart::around(const Domain& domain, const Vec& y) {
  LocalChart chart;
  chart.center = y;
  chart.basis = Mat::Zero(domain.embed_dim(), domain.dim());
  int col = 0;
  for (const auto& [start, len] : domain.factors()) {
    chart.basis.block(start, col, len, len - 1) = sphere_tangent_basis(Vec(y.segment(start, len)));
    col += len - 1;
  }
  return chart;
}

Vec LocalChart::at(const Domain& domain, const Vec& s) const {
  return domain.project_point(Vec(center + basis * s));
}

Mat LocalChart::jacobian(const Domain& domain, const Vec& s) const {
  const Vec z = center + basis * s;
  Mat j = Mat::Zero(z.size(), basis.cols());
  for (const auto& [start, len] : domain.factors()) {
    const double r = z.segment(start, len).norm();
    const Vec y = z.segment(start, len) / r;
    const Mat proj = (Mat::Identity(len, len) - y * y.transpose()) / r;
    j.middleRows(start, len) = proj * basis.middleRows(start, len);
  }
  return j;
}

double parameter_density(const Domain& domain, const LocalChart& chart, const Param& u) {
  return std::abs(Mat(chart.basis.transpose() * domain.embed_jacobian(u)).determinant());
}

std::size_t Domain::node_count() const {
  std::size_t count = 1;
  for (const auto& a : axes_) count *= a.nodes.size();
  return count;
}

std::vector<int> Domain::shape() const {
  std::vector<int> s;
  for (const auto& a : axes_) s.push_back(static_cast<int>(a.nodes.size()));
  return s;
}

Param Domain::node(std::size_t index) const {
  Param u(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    const std::size_t len = axes_[i].nodes.size();
    u(i) = axes_[i].nodes[index % len];
    index /= len;
  }
  return u;
}

double Domain::weight(std::size_t index) const {
  double w = 1.0;
  for (int i = dim() - 1; i >= 0; --i) {
    const std::size_t len = axes_[i].nodes.size();
    w *= axes_[i].weights[index % len];
    index /= len;
  }
  return w;
}

Immersion::Immersion(AmbientModel model, Domain domain, ChartFn chart, OrientFn orient,
                     double step)
    : model_(std::move(model)),
      domain_(std::move(domain)),
      chart_(std::move(chart)),
      orient_(std::move(orient)),
      step_(step) {
  if (domain_.dim() != model_.tangent_dim() - 1) {
    throw UsageError("immersion: domain dimension " + std::to_string(domain_.dim()) +
                     " is not a hypersurface of " + model_.describe());
  }
  if (!(step_ > 0.0)) throw UsageError("immersion: stencil step must be positive");
}

Immersion Immersion::with_domain(Domain domain) const {
  return Immersion(model_, std::move(domain), chart_, orient_, step_);
}

std::vector<Vec> stencil_points(const Vec& u, double h) {
  static constexpr double kOffsets[4] = {-2.0, -1.0, 1.0, 2.0};
  std::vector<Vec> pts;
  pts.reserve(4 * u.size() + 1);
  pts.push_back(u);
  for (int d = 0; d < u.size(); ++d) {
    for (double k : kOffsets) {
      Param p = u;
      p(d) += k * h;
      pts.push_back(p);
    }
  }
  return pts;
}

std::vector<Vec> stencil_points(const Domain& domain, const LocalChart& chart, const Vec& s,
                                double h) {
  std::vector<Vec> pts = stencil_points(s, h);
  for (Vec& p : pts) p = chart.at(domain, p);
  return pts;
}

Vec stencil_derivative(const std::vector<Vec>& values, int dir, double h) {
  const std::size_t b = 1 + 4 * static_cast<std::size_t>(dir);
  return (values[b] - 8.0 * values[b + 1] + 8.0 * values[b + 2] - values[b + 3]) / (12.0 * h);
}

double stencil_derivative(const std::vector<double>& values, int dir, double h) {
  const std::size_t b = 1 + 4 * static_cast<std::size_t>(dir);
  return (values[b] - 8.0 * values[b + 1] + 8.0 * values[b + 2] - values[b + 3]) / (12.0 * h);
}

namespace {

double small_determinant(const Mat& a) {
  switch (a.rows()) {
    case 1: return a(0, 0);
    case 2: return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default: return a.determinant();
  }
}

}  // namespace

Vec unit_normal(const AmbientModel& model, const Vec& x, const Mat& frame, const Vec& ref) {
  const Mat e = model.tangent_frame(x);
  const Mat c = e.transpose() * model.metric_signs().asDiagonal() * frame;
  const int m = static_cast<int>(c.rows());
  Vec z(m);
  for (int i = 0; i < m; ++i) {
    Mat minor(m - 1, m - 1);
    int r = 0;
    for (int k = 0; k < m; ++k) {
      if (k == i) continue;
      minor.row(r++) = c.row(k);
    }
    z(i) = ((i % 2) ? -1.0 : 1.0) * small_determinant(minor);
  }
  const double len = z.norm();
  if (!(len > 0.0)) throw NumericError("unit_normal: rank-deficient tangent frame");
  Vec xi = e * (z / len);
  if (model.inner(xi, ref) < 0.0) xi = -xi;
  return xi;
}

LocalFrame local_frame_from(const Immersion& f, const Vec& y, const std::vector<Vec>& points) {
  const AmbientModel& model = f.model();
  const int n = f.dim();
  LocalFrame lf;
  lf.y = y;
  lf.point = points[0];
  lf.frame.resize(model.embed_dim(), n);
  for (int i = 0; i < n; ++i) {
    lf.frame.col(i) = model.project_tangent(lf.point, stencil_derivative(points, i, f.step()));
  }
  lf.metric = lf.frame.transpose() * model.metric_signs().asDiagonal() * lf.frame;
  lf.metric = 0.5 * (lf.metric + lf.metric.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(lf.metric, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(n - 1);
  lf.condition = lo > 0.0 ? std::sqrt(hi / lo) : std::numeric_limits<double>::infinity();
  lf.sqrt_g = std::sqrt(std::max(0.0, lf.metric.determinant()));
  lf.normal = unit_normal(model, lf.point, lf.frame, f.orientation(y, lf.point));
  return lf;
}

LocalFrame local_frame(const Immersion& f, const LocalChart& chart, const Vec& s) {
  const auto pts = stencil_points(f.domain(), chart, s, f.step());
  std::vector<Vec> points;
  points.reserve(pts.size());
  for (const Vec& y : pts) points.push_back(f.point_at(y));
  return local_frame_from(f, pts[0], points);
}

LocalFrame local_frame_at(const Immersion& f, const Vec& y) {
  return local_frame(f, LocalChart::around(f.domain(), y), Vec::Zero(f.dim()));
}

std::vector<LocalFrame> stencil_frames(const Immersion& f, const LocalChart& chart) {
  // The 4n+1 stencils overlap heavily, so chart images are cached by integer offset.
  const int n = f.dim();
  const double h = f.step();
  std::vector<std::vector<int>> offsets{std::vector<int>(n, 0)};
  for (int d = 0; d < n; ++d) {
    for (int k : {-2, -1, 1, 2}) {
      offsets.emplace_back(n, 0);
      offsets.back()[d] = k;
    }
  }
  std::map<std::vector<int>, std::pair<Vec, Vec>> cache;
  auto image = [&](const std::vector<int>& key) -> const std::pair<Vec, Vec>& {
    auto it = cache.find(key);
    if (it == cache.end()) {
      Vec s(n);
      for (int i = 0; i < n; ++i) s(i) = h * key[i];
      const Vec y = chart.at(f.domain(), s);
      it = cache.emplace(key, std::pair{y, f.point_at(y)}).first;
    }
    return it->second;
  };
  std::vector<LocalFrame> frames;
  frames.reserve(offsets.size());
  for (const auto& centre : offsets) {
    std::vector<Vec> points;
    points.reserve(offsets.size());
    for (const auto& o : offsets) {
      std::vector<int> key = centre;
      for (int i = 0; i < n; ++i) key[i] += o[i];
      points.push_back(image(key).second);
    }
    frames.push_back(local_frame_from(f, image(centre).first, points));
  }
  return frames;
}

Vec gauss_image(const AmbientModel& model, const Vec& x, const Vec& xi) {
  if (model.kind() == ModelKind::Euclidean) return xi / xi.norm();
  Vec nu = model.to_base(model.transport(x, model.base_point(), xi));
  return nu / nu.norm();
}

AnisotropicVector anisotropic_vector(const AmbientModel& model, const Lagrangian& lagrangian,
                                     const Vec& x, const Vec& xi) {
  AnisotropicVector a;
  a.nu = gauss_image(model, x, xi);
  a.value = lagrangian.eval(a.nu);
  a.gradient = lagrangian.gradient(a.nu);
  a.w = model.kind() == ModelKind::Euclidean
            ? a.gradient
            : model.transport(model.base_point(), x, model.from_base(a.gradient));
  a.xi_f = a.value * xi + a.w;
  return a;
}

SurfaceSample assemble_sample(const Immersion& f, const Lagrangian& lagrangian,
                              const std::vector<LocalFrame>& frames) {
  const AmbientModel& model = f.model();
  const int n = f.dim();
  const double h = f.step();
  const Vec g = model.metric_signs();
  const LocalFrame& c = frames[0];

  std::vector<Vec> xis, xi_fs;
  std::vector<double> flux[kMaxDim];
  AnisotropicVector center;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const LocalFrame& lf = frames[k];
    const AnisotropicVector a = anisotropic_vector(model, lagrangian, lf.point, lf.normal);
    if (k == 0) center = a;
    xis.push_back(lf.normal);
    xi_fs.push_back(a.xi_f);
    const Vec wt = lf.metric.ldlt().solve(Vec(lf.frame.transpose() * g.asDiagonal() * a.w));
    for (int i = 0; i < n; ++i) flux[i].push_back(lf.sqrt_g * wt(i));
  }

  SurfaceSample s;
  s.y = c.y;
  s.point = c.point;
  s.frame = c.frame;
  s.metric = c.metric;
  s.sqrt_g = c.sqrt_g;
  s.condition = c.condition;
  s.xi = c.normal;
  s.nu = center.nu;
  s.f_value = center.value;
  s.gradient = center.gradient;
  s.w = center.w;
  s.xi_f = center.xi_f;

  Mat second(n, n), second_f(n, n);
  const Mat lowered = c.frame.transpose() * g.asDiagonal();
  double divergence = 0.0;
  double normal_part = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec dxi = stencil_derivative(xis, i, h);
    const Vec dxf = stencil_derivative(xi_fs, i, h);
    second.col(i) = -lowered * dxi;
    second_f.col(i) = -lowered * dxf;
    divergence += stencil_derivative(flux[i], i, h);
    normal_part = std::max(normal_part, std::abs(model.inner(dxf, c.normal)));
    scale = std::max(scale, model.norm(dxf));
  }
  second = 0.5 * (second + second.transpose());
  const auto metric_solver = c.metric.ldlt();
  s.shape = metric_solver.solve(second);
  s.aniso_shape = metric_solver.solve(second_f);
  s.mean = s.shape.trace();
  s.aniso_mean = s.aniso_shape.trace();
  s.aniso_mean_div = s.f_value * s.mean - divergence / c.sqrt_g;
  s.normal_residual = scale > 0.0 ? normal_part / scale : 0.0;
  const double wn = model.norm(s.w);
  s.tangency = wn > 0.0 ? std::abs(model.inner(s.w, s.xi)) / wn : 0.0;
  return s;
}

SurfaceSample surface_sample(const Immersion& f, const Lagrangian& lagrangian, const Param& u) {
  const LocalChart chart = LocalChart::around(f.domain(), f.domain().embed(u));
  SurfaceSample s = assemble_sample(f, lagrangian, stencil_frames(f, chart));
  s.u = u;
  s.density = s.sqrt_g * parameter_density(f.domain(), chart, u);
  return s;
}

std::vector<SurfaceSample> sample_all(const Immersion& f, const Lagrangian& lagrangian) {
  const Domain& d = f.domain();
  std::vector<SurfaceSample> out(d.node_count());
  parallel_for(out.size(), [&](std::size_t i) { out[i] = surface_sample(f, lagrangian, d.node(i)); });
  return out;
}

std::pair<Vec, double> real_spectrum(const Mat& operator_matrix) {
  Eigen::EigenSolver<Mat> eig(operator_matrix, false);
  const auto values = eig.eigenvalues();
  Vec re(values.size());
  double imag = 0.0;
  for (int i = 0; i < values.size(); ++i) {
    re(i) = values(i).real();
    imag = std::max(imag, std::abs(values(i).imag()));
  }
  std::sort(re.data(), re.data() + re.size());
  return {re, imag};
}

double metric_asymmetry(const Mat& metric, const Mat& op) {
  const Mat lowered = metric * op;
  const double norm = lowered.norm();
  return norm > 0.0 ? (lowered - lowered.transpose()).norm() / norm : 0.0;
}

double metric_operator_norm(const Mat& metric, const Mat& op) {
  const Eigen::LLT<Mat> llt(metric);
  if (llt.info() != Eigen::Success) throw NumericError("metric is not positive definite");
  const Mat l = llt.matrixL();
  // g = L L^T; conjugation by L^T gives the matrix in a g-orthonormal basis.
  const Mat lt_inv = l.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(l.rows(), l.cols()));
  return Mat(l.transpose() * op * lt_inv).norm();
}

Immersion euclidean_torus(double big, double small, const Domain& domain, double step) {
  if (domain.kind() != DomainKind::Torus2) throw UsageError("torus: needs a torus domain");
  if (!(big > small && small > 0.0)) throw UsageError("torus: need big > small > 0");
  auto chart = [big, small](const Vec& y) {
    Vec x(3);
    const double rho = big + small * y(2);
    x << rho * y(0), rho * y(1), small * y(3);
    return x;
  };
  auto orient = [big](const Vec& y, const Vec& x) {
    Vec core(3);
    core << big * y(0), big * y(1), 0.0;
    return Vec(x - core);
  };
  return Immersion(AmbientModel::euclidean(3), domain, chart, orient, step);
}

Immersion euclidean_ellipsoid(const std::array<double, 3>& axes, const Domain& domain,
                              double step) {
  if (domain.kind() != DomainKind::Sphere2) throw UsageError("ellipsoid: needs an S^2 domain");
  for (double a : axes)
    if (!(a > 0.0)) throw UsageError("ellipsoid: semi-axes must be positive");
  auto chart = [axes](const Vec& y) {
    Vec x(3);
    x << axes[0] * y(0), axes[1] * y(1), axes[2] * y(2);
    return x;
  };
  auto orient = [](const Vec&, const Vec& x) { return x; };
  return Immersion(AmbientModel::euclidean(3), domain, chart, orient, step);
}

Immersion graph_over_sphere(const AmbientModel& model, double radius, double amplitude,
                            const Domain& domain, double step) {
  if (!(radius > 0.0)) throw UsageError("graph over sphere: radius must be positive");
  if (domain.embed_dim() != model.tangent_dim() || domain.factors().size() != 1) {
    throw UsageError("graph over sphere: domain must be the unit sphere of T_{p0}M");
  }
  const Vec p0 = model.base_point();
  auto chart = [model, radius, amplitude, p0](const Vec& y) {
    const double last = y(y.size() - 1);
    const double rho = radius * (1.0 + amplitude * last * last);
    return model.exp(p0, model.from_base(rho * y));
  };
  auto orient = [model, p0](const Vec&, const Vec& x) { return Vec(-model.log(x, p0)); };
  return Immersion(model, domain, chart, orient, step);
}

}  // namespace aniso
