#include "aniso/symspace.hpp"

#include "aniso/errors.hpp"
#include "aniso/lagrangian.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace aniso {

namespace {

constexpr double kCutLocusGap = 1e-6;

bool hyperbolic(ModelKind kind) { return kind == ModelKind::HyperbolicProduct; }

// cos(s sqrt(lambda)) continued to lambda < 0.
double spectral_cos(double s, double lambda) {
  if (lambda >= 0.0) return std::cos(s * std::sqrt(lambda));
  return std::cosh(s * std::sqrt(-lambda));
}

// sin(s sqrt(lambda)) / (s sqrt(lambda)), continued to lambda <= 0.
double spectral_sinc(double s, double lambda) {
  const double x2 = s * s * lambda;
  if (std::abs(x2) < 1e-8) return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  if (x2 > 0.0) {
    const double x = std::sqrt(x2);
    return std::sin(x) / x;
  }
  const double x = std::sqrt(-x2);
  return std::sinh(x) / x;
}

// (1 - cos sqrt(lambda)) / lambda, the integral of s * sinc(s) over [0,1].
double spectral_kernel(double lambda) {
  if (std::abs(lambda) < 1e-6) return 0.5 - lambda / 24.0 + lambda * lambda / 720.0;
  return (1.0 - spectral_cos(1.0, lambda)) / lambda;
}

Mat random_rotation(int dim, std::mt19937_64& rng) {
  if (dim == 0) return Mat(0, 0);
  std::normal_distribution<double> normal;
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(dim, dim);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Euclidean: return "euclidean";
    case ModelKind::SphereProduct: return "sphere-product";
    case ModelKind::HyperbolicProduct: return "hyperbolic-product";
  }
  return "unknown";
}

AmbientModel AmbientModel::euclidean(int dim) {
  if (dim < 2 || dim > kMaxDim) {
    throw UsageError("euclidean model: dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
  }
  return AmbientModel(ModelKind::Euclidean, dim, 0);
}

AmbientModel AmbientModel::sphere_product(int p, int q) {
  if (p < 1 || q < 1 || p + q + 2 > kMaxDim) {
    throw UsageError("sphere product: need p, q >= 1 and p + q <= " + std::to_string(kMaxDim - 2));
  }
  return AmbientModel(ModelKind::SphereProduct, p, q);
}

AmbientModel AmbientModel::hyperbolic_product(int p, int q) {
  if (p < 1 || q < 1 || p + q + 2 > kMaxDim) {
    throw UsageError("hyperbolic product: need p, q >= 1 and p + q <= " +
                     std::to_string(kMaxDim - 2));
  }
  return AmbientModel(ModelKind::HyperbolicProduct, p, q);
}

int AmbientModel::epsilon() const {
  switch (kind_) {
    case ModelKind::Euclidean: return 0;
    case ModelKind::SphereProduct: return 1;
    case ModelKind::HyperbolicProduct: return -1;
  }
  return 0;
}

int AmbientModel::tangent_dim() const { return kind_ == ModelKind::Euclidean ? p_ : p_ + q_; }

int AmbientModel::embed_dim() const { return kind_ == ModelKind::Euclidean ? p_ : p_ + q_ + 2; }

double AmbientModel::conjugate_radius() const {
  return kind_ == ModelKind::SphereProduct ? kPi : std::numeric_limits<double>::infinity();
}

std::string AmbientModel::describe() const {
  switch (kind_) {
    case ModelKind::Euclidean: return "R^" + std::to_string(p_);
    case ModelKind::SphereProduct:
      return "S^" + std::to_string(p_) + " x S^" + std::to_string(q_);
    case ModelKind::HyperbolicProduct:
      return "H^" + std::to_string(p_) + " x H^" + std::to_string(q_);
  }
  return "?";
}

std::pair<int, int> AmbientModel::factor_range(int i) const {
  if (kind_ == ModelKind::Euclidean) return {0, p_};
  return i == 0 ? std::pair{0, p_ + 1} : std::pair{p_ + 1, q_ + 1};
}

Vec AmbientModel::base_point() const {
  Vec x = Vec::Zero(embed_dim());
  if (kind_ != ModelKind::Euclidean) {
    x(0) = 1.0;
    x(p_ + 1) = 1.0;
  }
  return x;
}

Vec AmbientModel::from_base(const Vec& t) const {
  if (t.size() != tangent_dim()) throw UsageError("from_base: dimension mismatch");
  if (kind_ == ModelKind::Euclidean) return t;
  Vec w = Vec::Zero(embed_dim());
  w.segment(1, p_) = t.head(p_);
  w.segment(p_ + 2, q_) = t.tail(q_);
  return w;
}

Vec AmbientModel::to_base(const Vec& w) const {
  if (w.size() != embed_dim()) throw UsageError("to_base: dimension mismatch");
  if (kind_ == ModelKind::Euclidean) return w;
  Vec t(tangent_dim());
  t.head(p_) = w.segment(1, p_);
  t.tail(q_) = w.segment(p_ + 2, q_);
  return t;
}

Vec AmbientModel::metric_signs() const {
  Vec g = Vec::Ones(embed_dim());
  if (hyperbolic(kind_)) {
    g(0) = -1.0;
    g(p_ + 1) = -1.0;
  }
  return g;
}

double AmbientModel::factor_inner(int i, const Vec& a, const Vec& b) const {
  const auto [start, len] = factor_range(i);
  double sum = a.segment(start, len).dot(b.segment(start, len));
  if (hyperbolic(kind_)) sum -= 2.0 * a(start) * b(start);
  return sum;
}

double AmbientModel::inner(const Vec& a, const Vec& b) const {
  if (kind_ == ModelKind::Euclidean) return a.dot(b);
  return factor_inner(0, a, b) + factor_inner(1, a, b);
}

double AmbientModel::norm(const Vec& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

Vec AmbientModel::project_point(const Vec& x) const {
  if (kind_ == ModelKind::Euclidean) return x;
  Vec y = x;
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    if (hyperbolic(kind_)) {
      y(start) = std::sqrt(1.0 + y.segment(start + 1, len - 1).squaredNorm());
    } else {
      const double n = y.segment(start, len).norm();
      if (!(n > 0.0)) throw NumericError("project_point: zero factor component");
      y.segment(start, len) /= n;
    }
  }
  return y;
}

Vec AmbientModel::project_tangent(const Vec& x, const Vec& w) const {
  if (kind_ == ModelKind::Euclidean) return w;
  Vec out = w;
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    const double c = factor_inner(i, w, x);
    if (hyperbolic(kind_)) {
      out.segment(start, len) += c * x.segment(start, len);
    } else {
      out.segment(start, len) -= c * x.segment(start, len);
    }
  }
  return out;
}

double AmbientModel::constraint_residual(const Vec& x) const {
  if (kind_ == ModelKind::Euclidean) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double target = hyperbolic(kind_) ? -1.0 : 1.0;
    worst = std::max(worst, std::abs(factor_inner(i, x, x) - target));
  }
  return worst;
}

Vec AmbientModel::exp(const Vec& x, const Vec& v) const {
  if (kind_ == ModelKind::Euclidean) return x + v;
  Vec y(x.size());
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    const auto xs = x.segment(start, len);
    const auto vs = v.segment(start, len);
    const double a = std::sqrt(std::max(0.0, factor_inner(i, v, v)));
    if (a < 1e-300) {
      y.segment(start, len) = xs;
    } else if (hyperbolic(kind_)) {
      y.segment(start, len) = std::cosh(a) * xs + (std::sinh(a) / a) * vs;
    } else {
      y.segment(start, len) = std::cos(a) * xs + (std::sin(a) / a) * vs;
    }
  }
  return project_point(y);
}

Vec AmbientModel::log(const Vec& x, const Vec& y) const {
  if (kind_ == ModelKind::Euclidean) return y - x;
  Vec out(x.size());
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    const double c = factor_inner(i, x, y);
    if (hyperbolic(kind_)) {
      Vec w = y.segment(start, len) + c * x.segment(start, len);
      Vec wf = Vec::Zero(x.size());
      wf.segment(start, len) = w;
      const double wn = std::sqrt(std::max(0.0, factor_inner(i, wf, wf)));
      const double angle = std::asinh(wn);
      out.segment(start, len) = wn > 0.0 ? Vec(angle / wn * w) : Vec(Vec::Zero(len));
    } else {
      Vec w = y.segment(start, len) - c * x.segment(start, len);
      const double wn = w.norm();
      const double angle = std::atan2(wn, c);
      if (angle > kPi - kCutLocusGap) {
        throw CutLocusError("log: points are antipodal in factor " + std::to_string(i));
      }
      out.segment(start, len) = wn > 0.0 ? Vec(angle / wn * w) : Vec(Vec::Zero(len));
    }
  }
  return out;
}

double AmbientModel::distance(const Vec& x, const Vec& y) const {
  if (kind_ == ModelKind::Euclidean) return (y - x).norm();
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double c = factor_inner(i, x, y);
    const double angle = hyperbolic(kind_) ? std::acosh(std::max(1.0, -c))
                                           : std::acos(std::clamp(c, -1.0, 1.0));
    sum += angle * angle;
  }
  return std::sqrt(sum);
}

Vec AmbientModel::transport(const Vec& x, const Vec& y, const Vec& w) const {
  if (kind_ == ModelKind::Euclidean) return w;
  Vec out(w.size());
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    const double cxy = factor_inner(i, x, y);
    const double cwy = factor_inner(i, w, y);
    const auto sum = x.segment(start, len) + y.segment(start, len);
    if (hyperbolic(kind_)) {
      out.segment(start, len) = w.segment(start, len) + cwy / (1.0 - cxy) * sum;
    } else {
      if (std::atan2(std::sqrt(std::max(0.0, 1.0 - cxy * cxy)), cxy) > kPi - kCutLocusGap) {
        throw CutLocusError("transport: points are antipodal in factor " + std::to_string(i));
      }
      out.segment(start, len) = w.segment(start, len) - cwy / (1.0 + cxy) * sum;
    }
  }
  return out;
}

Vec AmbientModel::transport_along(const Vec& x, const Vec& v, const Vec& w) const {
  if (kind_ == ModelKind::Euclidean) return w;
  Vec out = w;
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    const double a = std::sqrt(std::max(0.0, factor_inner(i, v, v)));
    if (a < 1e-300) continue;
    Vec u = Vec::Zero(w.size());
    u.segment(start, len) = v.segment(start, len) / a;
    const double c = factor_inner(i, w, u);
    const auto xs = x.segment(start, len);
    const auto us = u.segment(start, len);
    if (hyperbolic(kind_)) {
      out.segment(start, len) += c * (std::sinh(a) * xs + (std::cosh(a) - 1.0) * us);
    } else {
      out.segment(start, len) += c * (-std::sin(a) * xs + (std::cos(a) - 1.0) * us);
    }
  }
  return out;
}

Vec AmbientModel::geodesic_velocity(const Vec& x, const Vec& v) const {
  return transport_along(x, v, v);
}

Vec AmbientModel::curvature(const Vec& x, const Vec& a, const Vec& b, const Vec& c) const {
  (void)x;
  Vec out = Vec::Zero(a.size());
  if (kind_ == ModelKind::Euclidean) return out;
  const double eps = epsilon();
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    const double bc = factor_inner(i, b, c);
    const double ac = factor_inner(i, a, c);
    out.segment(start, len) = eps * (bc * a.segment(start, len) - ac * b.segment(start, len));
  }
  return out;
}

Mat AmbientModel::jacobi_operator(const Vec& x, const Vec& v) const {
  const int dim = embed_dim();
  Mat j = Mat::Zero(dim, dim);
  if (kind_ == ModelKind::Euclidean) return j;
  const double eps = epsilon();
  const Vec g = metric_signs();
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    const double vv = factor_inner(i, v, v);
    const Vec xs = x.segment(start, len);
    const Vec vs = v.segment(start, len);
    const Vec gs = g.segment(start, len);
    Mat proj = Mat::Identity(len, len);
    if (hyperbolic(kind_)) {
      proj += xs * xs.cwiseProduct(gs).transpose();
    } else {
      proj -= xs * xs.transpose();
    }
    j.block(start, start, len, len) = eps * (vv * proj - vs * vs.cwiseProduct(gs).transpose());
  }
  return j;
}

Mat AmbientModel::tangent_frame(const Vec& x) const {
  const int dim = embed_dim();
  if (kind_ == ModelKind::Euclidean) return Mat::Identity(dim, dim);
  Mat e = Mat::Zero(dim, tangent_dim());
  int col = 0;
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = factor_range(i);
    const Vec xs = x.segment(start, len);
    if (hyperbolic(kind_)) {
      // Transport of the coordinate frame from the base point.
      for (int j = 1; j < len; ++j) {
        Vec b = Vec::Zero(len);
        b(j) = 1.0;
        b += xs(j) / (1.0 + xs(0)) * (xs + unit_vector(len, 0));
        e.block(start, col++, len, 1) = b;
      }
    } else {
      e.block(start, col, len, len - 1) = sphere_tangent_basis(xs);
      col += len - 1;
    }
  }
  return e;
}

std::vector<Mat> AmbientModel::holonomy_samples(std::size_t count, std::mt19937_64& rng) const {
  const int dim = tangent_dim();
  std::vector<Mat> out;
  if (kind_ == ModelKind::Euclidean) {
    out.push_back(Mat::Identity(dim, dim));
    return out;
  }
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Mat g = Mat::Zero(dim, dim);
    g.topLeftCorner(p_, p_) = random_rotation(p_, rng);
    g.bottomRightCorner(q_, q_) = random_rotation(q_, rng);
    out.push_back(g);
  }
  return out;
}

double Root::operator()(const Mat& abelian, const Vec& w, const AmbientModel& model) const {
  double value = 0.0;
  for (int i = 0; i < functional.size(); ++i) value += functional(i) * model.inner(abelian.col(i), w);
  return value;
}

namespace {

// Orthonormalizes the columns of `cols` against `against` and each other (model metric),
// dropping columns that become negligible.
Mat orthonormalize(const AmbientModel& model, const Mat& against, const Mat& cols) {
  std::vector<Vec> basis;
  for (int j = 0; j < against.cols(); ++j) basis.push_back(against.col(j));
  const std::size_t fixed = basis.size();
  for (int j = 0; j < cols.cols(); ++j) {
    Vec c = cols.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& b : basis) c -= model.inner(c, b) * b;
    }
    const double n = model.norm(c);
    if (n > 1e-8) basis.push_back(c / n);
  }
  Mat out(model.embed_dim(), static_cast<int>(basis.size() - fixed));
  for (std::size_t k = fixed; k < basis.size(); ++k) out.col(static_cast<int>(k - fixed)) = basis[k];
  return out;
}

}  // namespace

RootData root_data(const AmbientModel& model, const Vec& x, const Vec& v,
                   std::optional<ReflectiveFactor> base) {
  const int dim = model.embed_dim();
  RootData data;
  data.epsilon = model.epsilon();
  const double vn = model.norm(v);
  if (!(vn > 0.0)) throw UsageError("root_data: v must be nonzero");
  if (model.kind() == ModelKind::Euclidean) {
    data.abelian = Mat(v / vn);
    data.abelian_horizontal = Mat(dim, 0);
    data.abelian_vertical = Mat(dim, 0);
    return data;
  }
  if (base && (base->factor < 0 || base->factor > 1)) {
    throw UsageError("root_data: reflective factor must be 0 or 1");
  }
  const Mat frame = model.tangent_frame(x);
  data.abelian = Mat::Zero(dim, 2);
  int frame_col = 0;
  for (int i = 0; i < 2; ++i) {
    const auto [start, len] = model.factor_range(i);
    const int fdim = len - 1;
    Vec vi = Vec::Zero(dim);
    vi.segment(start, len) = v.segment(start, len);
    const double ni = model.norm(vi);
    Vec hat;
    if (ni > 1e-12 * vn) {
      hat = vi / ni;
    } else {
      // Degenerate factor: complete with the first coordinate direction that is tangent enough.
      for (int j = 0; j < len; ++j) {
        Vec e = Vec::Zero(dim);
        e(start + j) = 1.0;
        Vec t = model.project_tangent(x, e);
        Vec ti = Vec::Zero(dim);
        ti.segment(start, len) = t.segment(start, len);
        const double tn = model.norm(ti);
        if (tn > 1e-3) {
          hat = ti / tn;
          break;
        }
      }
    }
    data.abelian.col(i) = hat;
    Root root;
    root.functional = unit_vector(2, i);
    root.space = orthonormalize(model, Mat(hat), frame.middleCols(frame_col, fdim));
    frame_col += fdim;
    root.multiplicity = static_cast<int>(root.space.cols());
    if (root.multiplicity == 0) continue;
    if (base) {
      const bool tangent_to_base = base->factor == i;
      root.horizontal = tangent_to_base ? root.space : Mat(dim, 0);
      root.vertical = tangent_to_base ? Mat(dim, 0) : root.space;
    }
    data.roots.push_back(std::move(root));
  }
  if (base) {
    data.abelian_horizontal = Mat(data.abelian.col(base->factor));
    data.abelian_vertical = Mat(data.abelian.col(1 - base->factor));
  } else {
    data.abelian_horizontal = Mat(dim, 0);
    data.abelian_vertical = Mat(dim, 0);
  }
  return data;
}

double root_identity_residual(const AmbientModel& model, const Vec& x, const RootData& data,
                              const std::vector<Vec>& ws) {
  double worst = 0.0;
  for (const Vec& w : ws) {
    const Mat j = model.jacobi_operator(x, w);
    for (const Root& root : data.roots) {
      const double a = root(data.abelian, w, model);
      const Mat diff = j * root.space - data.epsilon * a * a * root.space;
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    // Abelian: R(., w)w kills the abelian subspace, and R(a_i, a_j) = 0.
    worst = std::max(worst, (j * data.abelian).cwiseAbs().maxCoeff());
    for (int a = 0; a < data.abelian.cols(); ++a) {
      for (int b = 0; b < data.abelian.cols(); ++b) {
        const Vec r = model.curvature(x, data.abelian.col(a), data.abelian.col(b), w);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

JacobiSpectrum::JacobiSpectrum(const AmbientModel& model, const Vec& x, const Vec& w) {
  frame_ = model.tangent_frame(x);
  lowering_ = frame_.transpose() * model.metric_signs().asDiagonal();
  Mat k = lowering_ * model.jacobi_operator(x, w) * frame_;
  k = 0.5 * (k + k.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(k);
  vectors_ = eig.eigenvectors();
  eigenvalues_ = eig.eigenvalues();
}

template <class Fn>
Mat JacobiSpectrum::apply(Fn fn) const {
  Vec d(eigenvalues_.size());
  for (int i = 0; i < d.size(); ++i) d(i) = fn(eigenvalues_(i));
  return frame_ * vectors_ * d.asDiagonal() * vectors_.transpose() * lowering_;
}

Mat JacobiSpectrum::cosine(double s) const {
  return apply([s](double l) { return spectral_cos(s, l); });
}

Mat JacobiSpectrum::sinc(double s) const {
  return apply([s](double l) { return spectral_sinc(s, l); });
}

Mat JacobiSpectrum::scaled_sine(double s) const {
  return apply([s](double l) { return s * spectral_sinc(s, l); });
}

Mat JacobiSpectrum::holonomy_kernel() const {
  return apply([](double l) { return spectral_kernel(l); });
}

std::pair<Mat, Mat> dco_dsi(const AmbientModel& model, const Vec& x, const Vec& w, double s) {
  JacobiSpectrum spectrum(model, x, w);
  return {spectrum.cosine(s), spectrum.sinc(s)};
}

Vec propagate_jacobi(const AmbientModel& model, const Vec& x, const Vec& w, const Vec& y0,
                     const Vec& y0prime, double s) {
  JacobiSpectrum spectrum(model, x, w);
  const Vec start = spectrum.cosine(s) * y0 + spectrum.scaled_sine(s) * y0prime;
  return model.transport_along(x, s * w, start);
}

Vec tau_hol(const AmbientModel& model, const Vec& p, const Vec& v, const Vec& w) {
  if (model.kind() == ModelKind::Euclidean) return Vec::Zero(w.size());
  const Vec p0 = model.base_point();
  const Vec u = model.log(p0, p);
  JacobiSpectrum spectrum(model, p0, u);
  for (int i = 0; i < spectrum.eigenvalues().size(); ++i) {
    if (std::abs(spectral_sinc(1.0, spectrum.eigenvalues()(i))) < 1e-12) {
      throw CutLocusError("tau_hol: p is conjugate to the base point");
    }
  }
  // (exp_{p0})_{*u}(vbar) = tau_p(D^si_u vbar); invert it.
  const Vec pulled = model.transport(p, p0, v);
  const Mat dsi = spectrum.sinc(1.0);
  const Mat frame = model.tangent_frame(p0);
  const Mat lower = frame.transpose() * model.metric_signs().asDiagonal();
  const Mat local = lower * dsi * frame;
  const Vec vbar = frame * local.partialPivLu().solve(lower * pulled);
  const Vec kernel = spectrum.holonomy_kernel() * vbar;
  return -model.curvature(p0, u, kernel, w);
}

FocalRadiiReport focal_radii(const AmbientModel& model, const FocalSample& sample,
                             const FocalSearch& search) {
  if (!(search.hi > search.lo) || search.grid < 2) {
    throw UsageError("focal_radii: empty search interval or grid");
  }
  const int n = static_cast<int>(sample.frame.cols());
  JacobiSpectrum spectrum(model, sample.point, sample.xi_f);
  const Mat frame = model.tangent_frame(sample.point);
  const Mat lower = frame.transpose() * model.metric_signs().asDiagonal();
  const Mat fstar = lower * sample.frame;
  const Mat fa = lower * sample.frame * sample.shape;
  const Mat perp = sphere_tangent_basis(Vec(lower * sample.xi));

  auto bracket = [&](double s) -> Mat {
    const Mat dco = lower * spectrum.cosine(s) * frame;
    const Mat dsi = lower * spectrum.scaled_sine(s) * frame;
    return dco * fstar - dsi * fa;
  };
  auto rho = [&](double s) { return Mat(perp.transpose() * bracket(s)).determinant(); };
  auto sigma_min = [&](double s) {
    Eigen::JacobiSVD<Mat> svd(bracket(s));
    return svd.singularValues()(n - 1);
  };
  const double scale0 = Eigen::JacobiSVD<Mat>(bracket(0.0)).singularValues()(0);

  struct Candidate {
    double s;
    int nullity;
    double sigma;
  };
  std::vector<Candidate> candidates;
  auto consider = [&](double s) {
    Eigen::JacobiSVD<Mat> svd(bracket(s));
    const Vec sv = svd.singularValues();
    const double threshold = search.rank_threshold * std::max(sv(0), scale0);
    int nullity = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) <= threshold) ++nullity;
    if (nullity > 0) candidates.push_back({s, nullity, sv(n - 1)});
  };

  const int m = search.grid;
  std::vector<double> grid(m + 1), det(m + 1), smin(m + 1);
  for (int i = 0; i <= m; ++i) {
    grid[i] = search.lo + (search.hi - search.lo) * i / m;
    det[i] = rho(grid[i]);
    smin[i] = sigma_min(grid[i]);
  }
  auto within = [tol = search.tolerance](double a, double b) { return std::abs(b - a) < tol; };
  for (int i = 0; i < m; ++i) {
    if (det[i] == 0.0) {
      consider(grid[i]);
    } else if (det[i] * det[i + 1] < 0.0) {
      const auto [a, b] = boost::math::tools::bisect(rho, grid[i], grid[i + 1], within);
      consider(0.5 * (a + b));
    }
  }
  // Even-multiplicity roots do not change the sign of rho; catch them as minima of sigma_min.
  for (int i = 1; i < m; ++i) {
    if (smin[i] < smin[i - 1] && smin[i] <= smin[i + 1]) {
      std::uintmax_t iterations = 400;
      const auto best = boost::math::tools::brent_find_minima(sigma_min, grid[i - 1], grid[i + 1],
                                                              52, iterations);
      consider(best.first);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.s < b.s; });
  FocalRadiiReport report;
  report.lo = search.lo;
  report.hi = search.hi;
  // A simple root can be reached both by bisection and by the minimum search; Brent only
  // locates the minimum of a |s - s0|-shaped function to about 1e-7.
  const double merge = 0.01 * (search.hi - search.lo) / m;
  std::vector<Candidate> merged;
  for (const Candidate& c : candidates) {
    if (!merged.empty() && c.s - merged.back().s < merge) {
      if (c.sigma < merged.back().sigma) merged.back() = c;
      continue;
    }
    merged.push_back(c);
  }
  for (const Candidate& c : merged) report.roots.push_back({c.s, c.nullity});
  return report;
}

double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<double>& x, const std::vector<double>& y) {
    double worst = 0.0;
    for (double s : x) {
      double best = std::numeric_limits<double>::infinity();
      for (double t : y) best = std::min(best, std::abs(s - t));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace aniso
