#include "aniso/lagrangian.hpp"

#include "aniso/errors.hpp"
#include "aniso/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace aniso {

namespace {

constexpr double kUnitTolerance = 1e-12;

struct ProfileJet {
  double value = 0.0;
  double g = 0.0;        // phi'(theta) / sin(2 theta), smooth on [0, pi/2]
  double second = 0.0;   // phi''(theta)
};

// With x = cos 2theta: cos(2k theta) = T_k(x) and d/dtheta T_k(x) = -2 sin(2theta) k U_{k-1}(x).
ProfileJet profile_jet(const std::vector<double>& c, double x) {
  ProfileJet jet;
  double t = 1.0, t_prev = x;  // T_k, T_{k-1} (T_{-1} = T_1)
  double u_prev = 0.0, u_prev2 = -1.0;  // U_{k-1}, U_{k-2} (U_{-1} = 0, U_{-2} = -1)
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    jet.value += c[k] * t;
    jet.g -= 2.0 * kk * c[k] * u_prev;
    jet.second -= 4.0 * kk * kk * c[k] * t;
    const double t_next = 2.0 * x * t - t_prev;
    const double u_next = 2.0 * x * u_prev - u_prev2;
    t_prev = t;
    t = t_next;
    u_prev2 = u_prev;
    u_prev = u_next;
  }
  return jet;
}

Mat tangent_projector(const Vec& v) {
  return Mat::Identity(v.size(), v.size()) - v * v.transpose();
}

}  // namespace

std::string to_string(LagrangianFamily family) {
  switch (family) {
    case LagrangianFamily::Constant: return "constant";
    case LagrangianFamily::QuadraticForm: return "quadratic-form";
    case LagrangianFamily::AngleProfile: return "angle-profile";
    case LagrangianFamily::NumericWrapper: return "numeric";
  }
  return "unknown";
}

Lagrangian Lagrangian::constant(int n, double c) {
  if (n < 1) throw UsageError("lagrangian: dimension n must be >= 1");
  if (!(c > 0.0)) throw UsageError("lagrangian: constant Lagrangian must be positive");
  Lagrangian f;
  f.family_ = LagrangianFamily::Constant;
  f.n_ = n;
  f.constant_ = c;
  return f;
}

Lagrangian Lagrangian::quadratic_form(const Mat& q) {
  if (q.rows() != q.cols() || q.rows() < 2) {
    throw UsageError("lagrangian: quadratic form must be square with size >= 2");
  }
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + q.cwiseAbs().maxCoeff())) {
    throw UsageError("lagrangian: quadratic form must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(q);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw UsageError("lagrangian: quadratic form must be positive definite");
  }
  Lagrangian f;
  f.family_ = LagrangianFamily::QuadraticForm;
  f.n_ = static_cast<int>(q.rows()) - 1;
  f.quadratic_ = q;
  return f;
}

Lagrangian Lagrangian::angle_profile(int n, int split, std::vector<double> coefficients) {
  if (n < 1) throw UsageError("lagrangian: dimension n must be >= 1");
  if (split < 1 || split > n) {
    throw UsageError("lagrangian: angle-profile split must satisfy 1 <= split <= n");
  }
  if (coefficients.empty()) throw UsageError("lagrangian: angle profile needs coefficients");
  Lagrangian f;
  f.family_ = LagrangianFamily::AngleProfile;
  f.n_ = n;
  f.split_ = split;
  f.coefficients_ = std::move(coefficients);
  constexpr int kGrid = 1000;
  for (int i = 0; i <= kGrid; ++i) {
    const double theta = 0.5 * kPi * i / kGrid;
    if (!(f.profile(theta) > 0.0)) {
      throw UsageError("lagrangian: angle profile is not positive on [0, pi/2]");
    }
  }
  return f;
}

Lagrangian Lagrangian::numeric(int n, std::function<double(const Vec&)> evaluator,
                               FiniteDifferenceSteps steps) {
  if (n < 1) throw UsageError("lagrangian: dimension n must be >= 1");
  if (!evaluator) throw UsageError("lagrangian: numeric wrapper needs an evaluator");
  Lagrangian f;
  f.family_ = LagrangianFamily::NumericWrapper;
  f.n_ = n;
  f.evaluator_ = std::move(evaluator);
  f.steps_ = steps;
  return f;
}

void Lagrangian::require_unit(const Vec& v) const {
  if (v.size() != n_ + 1) {
    throw DomainError("lagrangian: vector has dimension " + std::to_string(v.size()) +
                      ", expected " + std::to_string(n_ + 1));
  }
  if (std::abs(v.norm() - 1.0) > kUnitTolerance) {
    throw DomainError("lagrangian: argument is not a unit vector");
  }
}

double Lagrangian::orbit_angle(const Vec& v) const {
  if (family_ != LagrangianFamily::AngleProfile) {
    throw UsageError("lagrangian: orbit angle requires an angle profile");
  }
  return std::atan2(v.tail(v.size() - split_).norm(), v.head(split_).norm());
}

double Lagrangian::profile(double theta) const {
  return profile_jet(coefficients_, std::cos(2.0 * theta)).value;
}

double Lagrangian::profile_derivative(double theta) const {
  return profile_jet(coefficients_, std::cos(2.0 * theta)).g * std::sin(2.0 * theta);
}

double Lagrangian::profile_second_derivative(double theta) const {
  return profile_jet(coefficients_, std::cos(2.0 * theta)).second;
}

Vec Lagrangian::orbit_representative(double theta) const {
  Vec v = Vec::Zero(n_ + 1);
  v(0) = std::cos(theta);
  v(split_) = std::sin(theta);
  return v;
}

double Lagrangian::eval(const Vec& v) const {
  require_unit(v);
  switch (family_) {
    case LagrangianFamily::Constant:
      return constant_;
    case LagrangianFamily::QuadraticForm:
      return std::sqrt(v.dot(quadratic_ * v));
    case LagrangianFamily::AngleProfile: {
      const double n1sq = v.head(split_).squaredNorm();
      const double n2sq = v.tail(v.size() - split_).squaredNorm();
      return profile_jet(coefficients_, (n1sq - n2sq) / (n1sq + n2sq)).value;
    }
    case LagrangianFamily::NumericWrapper:
      return evaluator_(v);
  }
  return 0.0;
}

Vec Lagrangian::gradient(const Vec& v) const {
  require_unit(v);
  switch (family_) {
    case LagrangianFamily::Constant:
      return Vec::Zero(v.size());
    case LagrangianFamily::QuadraticForm: {
      const Vec qv = quadratic_ * v;
      const double value = std::sqrt(v.dot(qv));
      return qv / value - value * v;
    }
    case LagrangianFamily::AngleProfile: {
      const int tail = static_cast<int>(v.size()) - split_;
      const double n1sq = v.head(split_).squaredNorm();
      const double n2sq = v.tail(tail).squaredNorm();
      const double total = n1sq + n2sq;
      const auto jet = profile_jet(coefficients_, (n1sq - n2sq) / total);
      Vec grad(v.size());
      grad.head(split_) = -2.0 * jet.g * (n2sq / total) * v.head(split_);
      grad.tail(tail) = 2.0 * jet.g * (n1sq / total) * v.tail(tail);
      return grad;
    }
    case LagrangianFamily::NumericWrapper: {
      const double h = steps_.gradient;
      if (!(h > 1e-12)) throw NumericError("lagrangian: gradient step underflow");
      const Mat basis = sphere_tangent_basis(v);
      Vec grad = Vec::Zero(v.size());
      for (int i = 0; i < basis.cols(); ++i) {
        const Vec e = basis.col(i);
        const double plus = evaluator_(sphere_exp(v, h * e));
        const double minus = evaluator_(sphere_exp(v, -h * e));
        grad += (plus - minus) / (2.0 * h) * e;
      }
      return grad;
    }
  }
  return Vec::Zero(v.size());
}

Mat Lagrangian::hessian(const Vec& v) const {
  require_unit(v);
  const int dim = static_cast<int>(v.size());
  switch (family_) {
    case LagrangianFamily::Constant:
      return Mat::Zero(dim, dim);
    case LagrangianFamily::QuadraticForm: {
      const Vec qv = quadratic_ * v;
      const double value = std::sqrt(v.dot(qv));
      const Mat ambient = quadratic_ / value - qv * qv.transpose() / (value * value * value) -
                          value * Mat::Identity(dim, dim);
      const Mat proj = tangent_projector(v);
      Mat h = proj * ambient * proj;
      return 0.5 * (h + h.transpose());
    }
    case LagrangianFamily::AngleProfile: {
      const int tail = dim - split_;
      const Vec v1 = v.head(split_);
      const Vec v2 = v.tail(tail);
      const double n1 = v1.norm();
      const double n2 = v2.norm();
      const double total = n1 * n1 + n2 * n2;
      const auto jet = profile_jet(coefficients_, (n1 * n1 - n2 * n2) / total);
      const double a = -2.0 * jet.g * n2 * n2 / total;
      const double b = 2.0 * jet.g * n1 * n1 / total;
      Mat h = Mat::Zero(dim, dim);
      constexpr double kTiny = 1e-300;
      if (n1 <= kTiny) {
        h.topLeftCorner(split_, split_) = a * Mat::Identity(split_, split_);
        h.bottomRightCorner(tail, tail) =
            b * (Mat::Identity(tail, tail) - v2 * v2.transpose() / (n2 * n2));
      } else if (n2 <= kTiny) {
        h.topLeftCorner(split_, split_) =
            a * (Mat::Identity(split_, split_) - v1 * v1.transpose() / (n1 * n1));
        h.bottomRightCorner(tail, tail) = b * Mat::Identity(tail, tail);
      } else {
        Vec u(dim);
        u.head(split_) = -(n2 / n1) * v1;
        u.tail(tail) = (n1 / n2) * v2;
        u /= std::sqrt(total);
        h = jet.second * u * u.transpose();
        h.topLeftCorner(split_, split_) +=
            a * (Mat::Identity(split_, split_) - v1 * v1.transpose() / (n1 * n1));
        h.bottomRightCorner(tail, tail) +=
            b * (Mat::Identity(tail, tail) - v2 * v2.transpose() / (n2 * n2));
      }
      return h;
    }
    case LagrangianFamily::NumericWrapper: {
      const double h = steps_.hessian;
      if (!(h > 1e-12)) throw NumericError("lagrangian: hessian step underflow");
      const Mat basis = sphere_tangent_basis(v);
      const int n = static_cast<int>(basis.cols());
      const double center = evaluator_(v);
      Mat local(n, n);
      for (int i = 0; i < n; ++i) {
        const Vec ei = basis.col(i);
        local(i, i) = (evaluator_(sphere_exp(v, h * ei)) - 2.0 * center +
                       evaluator_(sphere_exp(v, -h * ei))) /
                      (h * h);
        for (int j = i + 1; j < n; ++j) {
          const Vec ej = basis.col(j);
          const double pp = evaluator_(sphere_exp(v, h * (ei + ej)));
          const double pm = evaluator_(sphere_exp(v, h * (ei - ej)));
          const double mp = evaluator_(sphere_exp(v, h * (-ei + ej)));
          const double mm = evaluator_(sphere_exp(v, -h * (ei + ej)));
          local(i, j) = local(j, i) = (pp - pm - mp + mm) / (4.0 * h * h);
        }
      }
      return basis * local * basis.transpose();
    }
  }
  return Mat::Zero(dim, dim);
}

std::string Lagrangian::describe() const {
  std::ostringstream out;
  out << to_string(family_) << "(n=" << n_;
  switch (family_) {
    case LagrangianFamily::Constant:
      out << ", c=" << constant_;
      break;
    case LagrangianFamily::QuadraticForm:
      out << ", Q=" << quadratic_.rows() << "x" << quadratic_.cols();
      break;
    case LagrangianFamily::AngleProfile:
      out << ", split=" << split_ << ", coefficients=[";
      for (std::size_t k = 0; k < coefficients_.size(); ++k) {
        out << (k ? ", " : "") << coefficients_[k];
      }
      out << "]";
      break;
    case LagrangianFamily::NumericWrapper:
      break;
  }
  out << ")";
  return out.str();
}

Mat sphere_tangent_basis(const Vec& v) {
  const int dim = static_cast<int>(v.size());
  Eigen::HouseholderQR<Mat> qr(Mat(v / v.norm()));
  const Mat q = qr.householderQ() * Mat::Identity(dim, dim);
  return q.rightCols(dim - 1);
}

Vec sphere_exp(const Vec& v, const Vec& w) {
  const double len = w.norm();
  if (len == 0.0) return v;
  Vec out = std::cos(len) * v + (std::sin(len) / len) * w;
  return out / out.norm();
}

ConvexityReport check_convexity(const Lagrangian& lagrangian, std::span<const Vec> samples,
                                double tol) {
  if (samples.empty()) throw UsageError("check_convexity: empty sample set");
  ConvexityReport report;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const Vec& v : samples) {
    const Mat basis = sphere_tangent_basis(v);
    const Mat op = basis.transpose() *
                   (lagrangian.hessian(v) + lagrangian.eval(v) * Mat::Identity(v.size(), v.size())) *
                   basis;
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (op + op.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    if (lmin < report.min_eigenvalue) {
      report.min_eigenvalue = lmin;
      report.argmin = v;
    }
  }
  report.samples = samples.size();
  report.pass = report.min_eigenvalue > tol;
  return report;
}

std::vector<Vec> random_sphere_samples(int dim, std::size_t count, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<Vec> out;
  out.reserve(count);
  while (out.size() < count) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = normal(rng);
    const double len = v.norm();
    if (len < 1e-8) continue;
    out.push_back(v / len);
  }
  return out;
}

std::vector<Vec> convexity_samples(const Lagrangian& lagrangian, std::size_t count,
                                   std::mt19937_64& rng) {
  if (lagrangian.family() == LagrangianFamily::AngleProfile) {
    std::vector<Vec> out;
    out.reserve(count);
    const std::size_t last = std::max<std::size_t>(count, 2) - 1;
    for (std::size_t i = 0; i <= last; ++i) {
      out.push_back(lagrangian.orbit_representative(0.5 * kPi * static_cast<double>(i) /
                                                    static_cast<double>(last)));
    }
    return out;
  }
  return random_sphere_samples(lagrangian.ambient_dim(), count, rng);
}

double holonomy_residual(const Lagrangian& lagrangian, const Vec& v, std::span<const Mat> group) {
  const double base = lagrangian.eval(v);
  double worst = 0.0;
  for (const Mat& g : group) {
    Vec moved = g * v;
    moved /= moved.norm();
    worst = std::max(worst, std::abs(lagrangian.eval(moved) - base));
  }
  return worst;
}

double check_holonomy_invariance(const Lagrangian& lagrangian, const AmbientModel& model,
                                 const Vec& v, std::size_t orbit_samples, std::mt19937_64& rng) {
  if (model.tangent_dim() != lagrangian.ambient_dim()) {
    throw UsageError("check_holonomy_invariance: Lagrangian and model dimensions differ");
  }
  const auto group = model.holonomy_samples(orbit_samples, rng);
  return holonomy_residual(lagrangian, v, group);
}

double max_wulff_radius(const Lagrangian& lagrangian) {
  auto radius = [&](const Vec& v) {
    return std::sqrt(std::pow(lagrangian.eval(v), 2) + lagrangian.gradient(v).squaredNorm());
  };
  switch (lagrangian.family()) {
    case LagrangianFamily::Constant:
      return lagrangian.constant_value();
    case LagrangianFamily::QuadraticForm: {
      // |Qv| / sqrt(v^T Q v) is maximized at the top eigenvector: sqrt(lambda_max).
      Eigen::SelfAdjointEigenSolver<Mat> eig(lagrangian.quadratic_matrix(),
                                             Eigen::EigenvaluesOnly);
      return std::sqrt(eig.eigenvalues().maxCoeff());
    }
    case LagrangianFamily::AngleProfile: {
      double best = 0.0;
      constexpr int kGrid = 4000;
      for (int i = 0; i <= kGrid; ++i) {
        best = std::max(best, radius(lagrangian.orbit_representative(0.5 * kPi * i / kGrid)));
      }
      return best;
    }
    case LagrangianFamily::NumericWrapper: {
      std::mt19937_64 rng(12345);
      double best = 0.0;
      for (const Vec& v : random_sphere_samples(lagrangian.ambient_dim(), 4096, rng)) {
        best = std::max(best, radius(v));
      }
      return best;
    }
  }
  return 0.0;
}

Vec wulff_normal(const Lagrangian& lagrangian, const Vec& w) {
  const double len = w.norm();
  if (!(len > 0.0)) throw DomainError("wulff_normal: zero vector");
  // The normal is the minimiser of F(v) - <w, v> on the sphere (the minimum is 0 for w on
  // the Wulff shape), so Newton steps are safeguarded by backtracking on that function.
  auto merit = [&](const Vec& v) { return lagrangian.eval(v) - w.dot(v); };
  Vec v = w / len;
  for (int iter = 0; iter < 100; ++iter) {
    const Mat basis = sphere_tangent_basis(v);
    const Vec residual = basis.transpose() * (lagrangian.gradient(v) - w);
    if (residual.norm() < 1e-15 * (1.0 + len)) break;
    const Mat jac = basis.transpose() *
                    (lagrangian.hessian(v) + w.dot(v) * Mat::Identity(v.size(), v.size())) * basis;
    Eigen::LDLT<Mat> ldlt(jac);
    Vec step = -residual;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.vectorD().minCoeff() > 0.0) {
      step = ldlt.solve(-residual);
    }
    const double current = merit(v);
    double scale = 1.0;
    Vec next = sphere_exp(v, basis * step);
    for (int k = 0; k < 40 && merit(next) > current + 1e-15 * (1.0 + std::abs(current)); ++k) {
      scale *= 0.5;
      next = sphere_exp(v, scale * (basis * step));
    }
    v = next;
  }
  return v;
}

}  // namespace aniso
