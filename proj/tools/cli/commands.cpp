#include "commands.hpp"

#include "aniso/acceptance.hpp"
#include "aniso/tubes.hpp"
#include "aniso/variational.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <iostream>
#include <random>
#include <sstream>

namespace cli {

using aniso::Immersion;
using aniso::Param;
using aniso::Vec;
using json = nlohmann::ordered_json;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::vector<double> to_vector(const Vec& v) { return {v.data(), v.data() + v.size()}; }

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) { row(header); }
  Csv& cell(const std::string& s) {
    line_ += (line_.empty() ? "" : ",") + s;
    return *this;
  }
  Csv& cell(double x) { return cell(num(x)); }
  Csv& cells(const Vec& v) {
    for (int i = 0; i < v.size(); ++i) cell(v(i));
    return *this;
  }
  void end() {
    out_ << line_ << '\n';
    line_.clear();
  }
  void row(std::initializer_list<std::string> cols) {
    for (const auto& c : cols) cell(c);
    end();
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  std::string line_;
};

struct Context {
  const RunConfig& config;
  aniso::AmbientModel model;
  aniso::Lagrangian lagrangian;
  std::mt19937_64 rng;

  explicit Context(const RunConfig& c)
      : config(c), model(c.make_model()), lagrangian(c.make_lagrangian()), rng(c.run.seed) {}

  int sphere_dim() const { return model.tangent_dim() - 1; }

  Immersion sphere() const {
    return aniso::geodesic_sphere(model, lagrangian, config.surface.radius,
                                  aniso::Domain::sphere(sphere_dim(), config.surface.resolution));
  }

  aniso::TubeSpec tube_spec() const {
    return {config.surface.base == "point" ? aniso::BaseKind::Point : aniso::BaseKind::Factor,
            config.surface.factor, config.surface.radius};
  }

  Immersion tube() const {
    return aniso::build_tube(model, lagrangian, tube_spec(), config.surface.resolution);
  }

  // The surface named by [surface] chart.
  Immersion surface() const {
    const auto& s = config.surface;
    const int res = s.resolution;
    if (s.chart == "sphere") return sphere();
    if (s.chart == "tube") return tube();
    if (s.chart == "graph-over-sphere") {
      return aniso::graph_over_sphere(model, s.radius, s.amplitude,
                                      aniso::Domain::sphere(sphere_dim(), res));
    }
    if (model.kind() != aniso::ModelKind::Euclidean || model.tangent_dim() != 3) {
      throw ConfigError("[surface] chart = " + s.chart + " needs [model] kind = euclidean, dim = 3");
    }
    if (s.chart == "torus") return aniso::euclidean_torus(s.big, s.small, aniso::Domain::torus2(res, res));
    return aniso::euclidean_ellipsoid({s.axes[0], s.axes[1], s.axes[2]},
                                      aniso::Domain::sphere2(res, 2 * res));
  }

  std::vector<Param> nodes(const aniso::Domain& domain) const {
    if (config.run.u.empty()) return aniso::spread_nodes(domain, config.run.nodes);
    if (static_cast<int>(config.run.u.size()) != domain.dim()) {
      throw ConfigError("[run] u has " + std::to_string(config.run.u.size()) +
                        " entries, the chart has " + std::to_string(domain.dim()) + " parameters");
    }
    return {Eigen::Map<const Eigen::VectorXd>(config.run.u.data(), domain.dim())};
  }

  aniso::CriticalMode mode() const {
    return config.run.mode == "volume" ? aniso::CriticalMode::VolumePreserving
                                       : aniso::CriticalMode::Free;
  }
};

// Base normal (base coordinates) at the tube node with domain point y.
Vec tube_base_normal(const aniso::AmbientModel& model, const aniso::TubeSpec& spec, const Vec& y) {
  if (spec.base == aniso::BaseKind::Point) return y;
  Vec v = Vec::Zero(model.tangent_dim());
  const int offset = spec.factor == 0 ? 2 : 0;
  v(offset) = y(3);
  v(offset + 1) = y(4);
  return v;
}

Report lagrangian_check(Context& ctx) {
  Report r;
  const auto& f = ctx.lagrangian;
  const auto samples = aniso::convexity_samples(f, ctx.config.run.samples, ctx.rng);
  const auto convex = aniso::check_convexity(f, samples, ctx.config.tolerance(1e-8));
  double invariance = 0.0;
  for (const Vec& v : aniso::random_sphere_samples(f.ambient_dim(), 32, ctx.rng)) {
    invariance = std::max(invariance, aniso::check_holonomy_invariance(f, ctx.model, v, 16, ctx.rng));
  }
  const double wulff = aniso::max_wulff_radius(f);
  const double bound = ctx.model.epsilon() > 0 ? ctx.model.conjugate_radius() / (2.0 * wulff)
                                               : std::numeric_limits<double>::infinity();
  r.pass = convex.pass && invariance <= 1e-10;
  r.result = {{"family", f.describe()},
              {"convexity", {{"min_eigenvalue", convex.min_eigenvalue},
                             {"argmin", to_vector(convex.argmin)},
                             {"samples", convex.samples},
                             {"pass", convex.pass}}},
              {"holonomy_invariance_residual", invariance},
              {"max_wulff_radius", wulff}};
  r.result["radius_bound"] = std::isfinite(bound) ? json(bound) : json("none");
  r.summary = "convexity min eigenvalue " + sci(convex.min_eigenvalue) + ", invariance residual " +
              sci(invariance) + ", max |F(v)v + grad F| " + sci(wulff);
  return r;
}

Report surface_build(Context& ctx, const Immersion& f) {
  Report r;
  const auto samples = aniso::sample_all(f, ctx.lagrangian);
  const auto embedded = aniso::check_embedded(f);
  const int n = f.dim();
  std::ostringstream header;
  header << "node";
  for (int i = 0; i < n; ++i) header << ",u" << i;
  for (int i = 0; i < ctx.model.embed_dim(); ++i) header << ",x" << i;
  header << ",H,H_F";
  for (int i = 0; i < n; ++i) header << ",lambda" << i;
  Csv csv({header.str()});
  double min_sqrt_g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    min_sqrt_g = std::min(min_sqrt_g, s.sqrt_g);
    csv.cell(std::to_string(i)).cells(s.u).cells(s.point).cell(s.mean).cell(s.aniso_mean)
        .cells(aniso::real_spectrum(s.aniso_shape).first)
        .end();
  }
  r.pass = embedded.pass;
  r.csv = csv.str();
  r.result = {{"nodes", samples.size()},
              {"area", aniso::area(f)},
              {"energy", aniso::energy(f, ctx.lagrangian)},
              {"min_sqrt_g", min_sqrt_g},
              {"min_separation", embedded.min_separation},
              {"embedded", embedded.pass}};
  r.summary = std::to_string(samples.size()) + " nodes, min node separation " +
              sci(embedded.min_separation);
  return r;
}

using ClosedForm = std::function<aniso::ClosedFormReport(const Vec& y)>;

Report spectrum(Context& ctx, const Immersion& f, const ClosedForm& closed) {
  Report r;
  const double tol = ctx.config.tolerance(1e-4);
  double worst = 0.0;
  json entries = json::array();
  for (const Param& u : ctx.nodes(f.domain())) {
    const auto s = aniso::surface_sample(f, ctx.lagrangian, u);
    const auto cf = closed(s.y);
    const auto [numeric, imag] = aniso::real_spectrum(s.aniso_shape);
    const Vec delta = numeric - cf.eigenvalues;
    worst = std::max(worst, delta.cwiseAbs().maxCoeff());
    entries.push_back({{"u", to_vector(u)},
                       {"numeric", to_vector(numeric)},
                       {"closed_form", to_vector(cf.eigenvalues)},
                       {"delta", to_vector(delta)},
                       {"max_imag", imag},
                       {"asymmetry", aniso::metric_asymmetry(s.metric, s.aniso_shape)}});
  }
  r.pass = worst <= tol;
  r.result = {{"tolerance", tol}, {"max_delta", worst}, {"nodes", entries}};
  r.summary = std::to_string(entries.size()) + " nodes, max |numeric - closed form| " + sci(worst) +
              " (tol " + sci(tol) + ")";
  return r;
}

json roots_json(const std::vector<aniso::FocalRoot>& roots) {
  json out = json::array();
  for (const auto& root : roots) out.push_back({{"s", root.s}, {"multiplicity", root.multiplicity}});
  return out;
}

Report focal(Context& ctx, const Immersion& f, const ClosedForm& closed) {
  Report r;
  const double tol = ctx.config.tolerance(1e-5);
  double worst = 0.0;
  bool multiplicities = true;
  json entries = json::array();
  for (const Param& u : ctx.nodes(f.domain())) {
    const auto s = aniso::surface_sample(f, ctx.lagrangian, u);
    const auto cf = closed(s.y);
    const auto found = aniso::focal_radii(ctx.model, aniso::focal_sample(s));
    std::vector<double> expected;
    for (const auto& root : cf.afr) expected.push_back(root.s);
    const double h = aniso::hausdorff(aniso::root_values(found), expected);
    bool same = found.roots.size() == cf.afr.size();
    for (std::size_t k = 0; same && k < cf.afr.size(); ++k) {
      same = found.roots[k].multiplicity == cf.afr[k].multiplicity;
    }
    worst = std::max(worst, h);
    multiplicities = multiplicities && same;
    entries.push_back({{"u", to_vector(u)},
                       {"numeric", roots_json(found.roots)},
                       {"closed_form", roots_json(cf.afr)},
                       {"hausdorff", std::isfinite(h) ? json(h) : json("inf")},
                       {"multiplicities_agree", same}});
  }
  r.pass = worst <= tol && multiplicities;
  r.result = {{"tolerance", tol},
              {"max_hausdorff", std::isfinite(worst) ? json(worst) : json("inf")},
              {"multiplicities_agree", multiplicities},
              {"nodes", entries}};
  r.summary = std::to_string(entries.size()) + " nodes, max Hausdorff " + sci(worst) +
              (multiplicities ? "" : ", multiplicity mismatch");
  return r;
}

std::vector<double> t_grid(const Context& ctx) {
  return ctx.config.run.t_grid.empty() ? aniso::default_t_grid(ctx.config.surface.radius)
                                       : ctx.config.run.t_grid;
}

Report equifocal(Context& ctx, const Immersion& f) {
  Report r;
  const double tol = ctx.config.tolerance(1e-5);
  const auto nodes = ctx.nodes(f.domain());
  const auto rep = aniso::check_equifocal(f, ctx.lagrangian, nodes, {}, tol);
  Csv csv({"node,s"});
  for (std::size_t i = 0; i < rep.sets.size(); ++i)
    for (double s : rep.sets[i]) csv.cell(std::to_string(i)).cell(s).end();
  r.pass = rep.pass;
  r.csv = csv.str();
  r.result = {{"tolerance", tol}, {"nodes", nodes.size()}, {"max_hausdorff", rep.max_hausdorff},
              {"equifocal", rep.pass}, {"reference_set", rep.sets.empty() ? json::array() : json(rep.sets.front())}};
  r.summary = "max Hausdorff between nodes " + sci(rep.max_hausdorff) + (rep.pass ? ": equifocal" : ": not equifocal");
  return r;
}

Report isoparametric(Context& ctx, const Immersion& f) {
  Report r;
  const double tol = ctx.config.tolerance(1e-5);
  const auto rep = aniso::check_isoparametric(f, ctx.lagrangian, t_grid(ctx), ctx.nodes(f.domain()), tol);
  Csv csv({"t,spread"});
  for (std::size_t i = 0; i < rep.t_grid.size(); ++i) csv.cell(rep.t_grid[i]).cell(rep.spread[i]).end();
  r.pass = rep.pass;
  r.csv = csv.str();
  r.result = {{"tolerance", tol}, {"t_grid", rep.t_grid}, {"spread", rep.spread},
              {"max_spread", rep.max_spread}, {"isoparametric", rep.pass}};
  r.summary = "max spread of H_F over the parallel family " + sci(rep.max_spread) +
              (rep.pass ? ": isoparametric" : ": not isoparametric");
  return r;
}

Report reconstruct(Context& ctx, const Immersion& f) {
  Report r;
  const double tol = ctx.config.tolerance(1e-7);
  const double offset = ctx.config.run.offset.value_or(-ctx.config.surface.radius);
  const auto rep = aniso::reconstruct_from_focal(f, ctx.lagrangian, offset, ctx.nodes(f.domain()));
  r.pass = rep.max_distance <= tol;
  r.result = {{"tolerance", tol}, {"offset", rep.offset}, {"collapse_rank", rep.collapse_rank},
              {"nodes", rep.nodes}, {"max_distance", rep.max_distance}};
  r.summary = "focal set rank " + std::to_string(rep.collapse_rank) + ", max distance back to f " +
              sci(rep.max_distance);
  return r;
}

Report verify_variation(Context& ctx) {
  Report r;
  const double tol = ctx.config.tolerance(1e-4);
  const Immersion f = ctx.surface();
  std::vector<aniso::Variation> vs;
  for (int k = 0; k < ctx.config.run.variations; ++k) {
    vs.push_back(aniso::random_variation(f, ctx.rng, ctx.mode() == aniso::CriticalMode::VolumePreserving));
  }
  const auto reps = aniso::verify_first_variation(f, ctx.lagrangian, vs, {ctx.config.run.step});
  Csv csv({"variation,fd_derivative,formula_value,abs_error,rel_error,step"});
  double worst = 0.0;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const auto& e = reps[k];
    worst = std::max(worst, e.rel_error);
    csv.cell(std::to_string(k)).cell(e.fd_derivative).cell(e.formula_value).cell(e.abs_error)
        .cell(e.rel_error).cell(e.step).end();
  }
  r.pass = worst <= tol;
  r.csv = csv.str();
  r.result = {{"tolerance", tol}, {"variations", reps.size()}, {"max_rel_error", worst}};
  r.summary = std::to_string(reps.size()) + " variations, max relative error " + sci(worst);
  return r;
}

Report verify_critical(Context& ctx) {
  Report r;
  const double tol = ctx.config.tolerance(1e-6);
  const Immersion f = ctx.surface();
  const auto rep = aniso::verify_critical_point(f, ctx.lagrangian, ctx.mode(), ctx.config.run.variations,
                                                ctx.rng, tol);
  r.pass = rep.critical_by_derivative && rep.consistent;
  r.result = {{"tolerance", tol},
              {"mode", ctx.config.run.mode},
              {"derivatives", rep.derivatives},
              {"max_derivative", rep.max_derivative},
              {"max_abs_mean", rep.max_abs_mean},
              {"spread", rep.spread},
              {"critical_by_derivative", rep.critical_by_derivative},
              {"critical_by_curvature", rep.critical_by_curvature},
              {"consistent", rep.consistent}};
  r.summary = "max |dF/dt| " + sci(rep.max_derivative) + ", H_F spread " + sci(rep.spread) +
              (rep.critical_by_derivative ? ": critical" : ": not critical") +
              (rep.consistent ? "" : " (derivative and curvature tests disagree)");
  return r;
}

Report flow_run(Context& ctx) {
  Report r;
  aniso::FlowOptions options;
  options.steps = ctx.config.run.steps;
  options.dt = ctx.config.run.dt;
  options.mode = ctx.mode();
  options.degree = ctx.config.run.degree;
  const auto rep = aniso::gradient_flow(ctx.surface(), ctx.lagrangian, options);
  Csv csv({"step,dt,energy,max_abs_H_F,spread_H_F,rejections"});
  for (const auto& s : rep.trajectory) {
    csv.cell(std::to_string(s.step)).cell(s.dt).cell(s.energy).cell(s.max_abs_mean).cell(s.spread)
        .cell(std::to_string(s.rejections)).end();
  }
  r.pass = rep.monotone;
  r.csv = csv.str();
  const auto& first = rep.trajectory.front();
  const auto& last = rep.trajectory.back();
  r.result = {{"steps", rep.trajectory.size() - 1}, {"monotone", rep.monotone},
              {"initial_energy", first.energy}, {"final_energy", last.energy},
              {"final_spread", last.spread}};
  r.summary = "energy " + num(first.energy) + " -> " + num(last.energy) +
              (rep.monotone ? " (monotone)" : " (not monotone)");
  return r;
}

Report selftest(const RunConfig& config) {
  Report r;
  aniso::AcceptanceOptions options;
  options.seed = config.run.seed;
  json rows = json::array();
  Csv csv({"id,title,pass,seconds"});
  int passed = 0;
  for (int id = 1; id <= aniso::kAcceptanceCount; ++id) {
    const auto res = aniso::run_criterion(id, options);
    std::cout << aniso::format_result(res) << std::endl;
    passed += res.pass ? 1 : 0;
    rows.push_back({{"id", res.id}, {"title", res.title}, {"pass", res.pass}, {"detail", res.detail},
                    {"seconds", res.seconds}});
    csv.cell(std::to_string(res.id)).cell(res.title).cell(res.pass ? "pass" : "fail").end();
  }
  r.pass = passed == aniso::kAcceptanceCount;
  r.csv = csv.str();
  r.result = {{"passed", passed}, {"total", aniso::kAcceptanceCount}, {"criteria", rows}};
  r.summary = std::to_string(passed) + "/" + std::to_string(aniso::kAcceptanceCount) + " criteria pass";
  return r;
}

}  // namespace

Report run_command(const std::string& command, const RunConfig& config) {
  if (command == "selftest") return selftest(config);
  Context ctx(config);
  const double radius = config.surface.radius;
  const ClosedForm sphere_closed = [&](const Vec& y) {
    return aniso::closed_form_sphere_spectrum(ctx.model, ctx.lagrangian, radius, y);
  };
  const ClosedForm tube_closed = [&](const Vec& y) {
    const auto spec = ctx.tube_spec();
    if (spec.base == aniso::BaseKind::Point) return sphere_closed(y);
    return aniso::closed_form_tube_spectrum(ctx.model, spec.factor, ctx.lagrangian, radius,
                                            tube_base_normal(ctx.model, spec, y));
  };
  if (command == "lagrangian check") return lagrangian_check(ctx);
  if (command == "sphere build") return surface_build(ctx, ctx.sphere());
  if (command == "sphere spectrum") return spectrum(ctx, ctx.sphere(), sphere_closed);
  if (command == "sphere afr") return focal(ctx, ctx.sphere(), sphere_closed);
  if (command == "tube build") return surface_build(ctx, ctx.tube());
  if (command == "tube spectrum") return spectrum(ctx, ctx.tube(), tube_closed);
  if (command == "tube afr") return focal(ctx, ctx.tube(), tube_closed);
  if (command == "tube check-equifocal") return equifocal(ctx, ctx.tube());
  if (command == "tube check-isoparametric") return isoparametric(ctx, ctx.tube());
  if (command == "tube reconstruct") return reconstruct(ctx, ctx.tube());
  if (command == "verify variation") return verify_variation(ctx);
  if (command == "verify critical") return verify_critical(ctx);
  if (command == "flow run") return flow_run(ctx);
  throw aniso::UsageError("unknown command '" + command + "'");
}

std::string write_report(const std::string& command, const RunConfig& config, const Report& report) {
  std::string stem = command;
  std::replace(stem.begin(), stem.end(), ' ', '-');
  const std::filesystem::path dir(config.run.out);
  std::filesystem::create_directories(dir);
  json doc;
  doc["tool"] = "aniso";
  doc["version"] = ANISO_VERSION;
  doc["command"] = command;
  doc["pass"] = report.pass;
  doc["summary"] = report.summary;
  doc["config"] = config.to_json();
  doc["result"] = report.result;
  const auto path = dir / (stem + ".json");
  std::ofstream(path) << doc.dump(2) << '\n';
  if (!report.csv.empty()) std::ofstream(dir / (stem + ".csv")) << report.csv;
  return path.string();
}

}  // namespace cli
