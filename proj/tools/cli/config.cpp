#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

IniFile IniFile::parse(const std::string& text, const std::string& source) {
  IniFile ini;
  ini.source_ = source;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  auto error = [&](const std::string& message) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + message);
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    const std::string body = trim(std::string_view(raw).substr(0, comment));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') error("unterminated section header '" + body + "'");
      section = lower(trim(std::string_view(body).substr(1, body.size() - 2)));
      if (section.empty()) error("empty section name");
      if (ini.section_lines_.count(section)) error("section [" + section + "] appears twice");
      ini.section_lines_[section] = line;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) error("expected 'key = value', got '" + body + "'");
    if (section.empty()) error("key outside of any [section]");
    const std::string key = lower(trim(std::string_view(body).substr(0, eq)));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) error("missing key before '='");
    auto& keys = ini.sections_[section];
    if (keys.count(key)) error("duplicate key '" + key + "' in [" + section + "]");
    keys[key] = Entry{value, line};
  }
  return ini;
}

IniFile IniFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

const IniFile::Entry* IniFile::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void IniFile::require_known(const std::map<std::string, std::vector<std::string>>& allowed) const {
  for (const auto& [section, line] : section_lines_) {
    if (!allowed.count(section)) {
      throw ConfigError(source_ + ":" + std::to_string(line) + ": unknown section [" + section + "]");
    }
  }
  for (const auto& [section, keys] : sections_) {
    const auto& names = allowed.at(section);
    for (const auto& [key, entry] : keys) {
      if (std::find(names.begin(), names.end(), key) == names.end()) {
        fail(&entry, "unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
}

void IniFile::fail(const Entry* entry, const std::string& message) const {
  if (entry == nullptr) throw ConfigError(source_ + ": " + message);
  throw ConfigError(source_ + ":" + std::to_string(entry->line) + ": " + message);
}

namespace {

class Reader {
 public:
  explicit Reader(const IniFile& ini) : ini_(ini) {}

  void text(const char* section, const char* key, std::string& out,
            std::initializer_list<const char*> choices = {}) const {
    const auto* e = ini_.find(section, key);
    if (!e) return;
    const std::string v = lower(e->value);
    if (choices.size() > 0 &&
        std::none_of(choices.begin(), choices.end(), [&](const char* c) { return v == c; })) {
      std::string list;
      for (const char* c : choices) list += std::string(list.empty() ? "" : ", ") + c;
      ini_.fail(e, std::string(key) + " must be one of {" + list + "}, got '" + e->value + "'");
    }
    out = v;
  }

  template <class T>
  void number(const char* section, const char* key, T& out) const {
    const auto* e = ini_.find(section, key);
    if (e) out = parse<T>(e, e->value, key);
  }

  template <class T>
  void optional(const char* section, const char* key, std::optional<T>& out) const {
    const auto* e = ini_.find(section, key);
    if (e) out = parse<T>(e, e->value, key);
  }

  void list(const char* section, const char* key, std::vector<double>& out) const {
    const auto* e = ini_.find(section, key);
    if (!e) return;
    out.clear();
    std::string item;
    std::istringstream in(e->value);
    while (in >> item) {
      if (item.back() == ',') item.pop_back();
      if (!item.empty()) out.push_back(parse<double>(e, item, key));
    }
  }

  const IniFile::Entry* at(const char* section, const char* key) const {
    return ini_.find(section, key);
  }

 private:
  template <class T>
  T parse(const IniFile::Entry* e, const std::string& text, const char* key) const {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      ini_.fail(e, std::string(key) + ": cannot read '" + text + "' as " +
                       (std::is_integral_v<T> ? "an integer" : "a number"));
    }
    return value;
  }

  const IniFile& ini_;
};

}  // namespace

RunConfig RunConfig::from_file(const std::optional<std::string>& path) {
  RunConfig c;
  if (!path) return c;
  const IniFile ini = IniFile::load(*path);
  ini.require_known({
      {"model", {"kind", "dim", "p", "q"}},
      {"lagrangian", {"family", "n", "params"}},
      {"surface",
       {"chart", "radius", "resolution", "base", "factor", "amplitude", "big", "small", "axes"}},
      {"run",
       {"seed", "threads", "tol", "out", "u", "nodes", "t_grid", "offset", "variations", "mode",
        "steps", "dt", "degree", "samples", "step"}},
  });
  c.source = *path;
  const Reader r(ini);
  r.text("model", "kind", c.model.kind, {"euclidean", "sphere_product", "hyperbolic_product"});
  r.number("model", "dim", c.model.dim);
  r.number("model", "p", c.model.p);
  r.number("model", "q", c.model.q);

  const bool euclidean = c.model.kind == "euclidean";
  if (euclidean) {
    // Sensible Euclidean fallbacks when the lagrangian block is partial.
    c.lagrangian = LagrangianSpec{"constant", c.model.dim - 1, {1.0}};
  } else {
    c.lagrangian.n = c.model.p + c.model.q - 1;
  }
  r.text("lagrangian", "family", c.lagrangian.family, {"constant", "quadratic_form", "angle_profile"});
  if (r.at("lagrangian", "family") && !r.at("lagrangian", "params")) {
    if (c.lagrangian.family == "constant") c.lagrangian.params = {1.0};
    if (c.lagrangian.family == "angle_profile") c.lagrangian.params = {1.0};
  }
  r.number("lagrangian", "n", c.lagrangian.n);
  r.list("lagrangian", "params", c.lagrangian.params);

  r.text("surface", "chart", c.surface.chart, {"sphere", "tube", "graph-over-sphere", "torus", "ellipsoid"});
  r.number("surface", "radius", c.surface.radius);
  r.number("surface", "resolution", c.surface.resolution);
  r.text("surface", "base", c.surface.base, {"factor", "point"});
  r.number("surface", "factor", c.surface.factor);
  r.number("surface", "amplitude", c.surface.amplitude);
  r.number("surface", "big", c.surface.big);
  r.number("surface", "small", c.surface.small);
  r.list("surface", "axes", c.surface.axes);

  r.number("run", "seed", c.run.seed);
  r.number("run", "threads", c.run.threads);
  r.optional("run", "tol", c.run.tol);
  if (const auto* e = r.at("run", "out")) c.run.out = e->value;
  r.list("run", "u", c.run.u);
  r.number("run", "nodes", c.run.nodes);
  r.list("run", "t_grid", c.run.t_grid);
  r.optional("run", "offset", c.run.offset);
  r.number("run", "variations", c.run.variations);
  r.text("run", "mode", c.run.mode, {"free", "volume"});
  r.number("run", "steps", c.run.steps);
  r.number("run", "dt", c.run.dt);
  r.number("run", "degree", c.run.degree);
  r.number("run", "samples", c.run.samples);
  r.number("run", "step", c.run.step);

  // Value checks that can point at a line.
  auto positive = [&](const char* section, const char* key, double value) {
    if (!(value > 0.0)) ini.fail(r.at(section, key), std::string(key) + " must be positive");
  };
  if (c.surface.resolution < 16) {
    ini.fail(r.at("surface", "resolution"), "resolution must be at least 16 per chart direction");
  }
  positive("surface", "radius", c.surface.radius);
  positive("run", "dt", c.run.dt);
  positive("run", "step", c.run.step);
  if (c.run.tol) positive("run", "tol", *c.run.tol);
  if (c.run.nodes < 1) ini.fail(r.at("run", "nodes"), "nodes must be at least 1");
  if (c.run.variations < 1) ini.fail(r.at("run", "variations"), "variations must be at least 1");
  if (c.run.steps < 1) ini.fail(r.at("run", "steps"), "steps must be at least 1");
  if (c.run.samples < 1) ini.fail(r.at("run", "samples"), "samples must be at least 1");
  if (c.surface.factor != 0 && c.surface.factor != 1) {
    ini.fail(r.at("surface", "factor"), "factor must be 0 or 1");
  }
  if (c.surface.axes.size() != 3) ini.fail(r.at("surface", "axes"), "axes needs three values");

  // Cross-block consistency.
  const auto* family = r.at("lagrangian", "family");
  const auto* kind = r.at("model", "kind");
  auto line_of = [](const IniFile::Entry* e) {
    return e ? " (line " + std::to_string(e->line) + ")" : std::string(" (default)");
  };
  if (c.lagrangian.family == "quadratic_form" && !euclidean) {
    ini.fail(family, "[lagrangian] family = quadratic_form" + line_of(family) +
                         " is only holonomy invariant on a Euclidean model, but [model] kind = " +
                         c.model.kind + line_of(kind));
  }
  if (c.lagrangian.family == "angle_profile" && euclidean) {
    ini.fail(family, "[lagrangian] family = angle_profile" + line_of(family) +
                         " needs a product model, but [model] kind = euclidean" + line_of(kind));
  }
  const int tangent = euclidean ? c.model.dim : c.model.p + c.model.q;
  if (c.lagrangian.n != tangent - 1) {
    ini.fail(r.at("lagrangian", "n"), "[lagrangian] n = " + std::to_string(c.lagrangian.n) +
                                          " must be dim T_pM - 1 = " + std::to_string(tangent - 1) +
                                          " for [model] kind = " + c.model.kind + line_of(kind));
  }
  return c;
}

aniso::AmbientModel RunConfig::make_model() const {
  if (model.kind == "euclidean") return aniso::AmbientModel::euclidean(model.dim);
  if (model.kind == "sphere_product") return aniso::AmbientModel::sphere_product(model.p, model.q);
  return aniso::AmbientModel::hyperbolic_product(model.p, model.q);
}

aniso::Lagrangian RunConfig::make_lagrangian() const {
  const auto& l = lagrangian;
  if (l.family == "constant") {
    if (l.params.size() != 1) throw ConfigError("[lagrangian] constant takes one parameter c");
    return aniso::Lagrangian::constant(l.n, l.params.front());
  }
  if (l.family == "quadratic_form") {
    const int size = l.n + 1;
    if (static_cast<int>(l.params.size()) != size * size) {
      throw ConfigError("[lagrangian] quadratic_form needs " + std::to_string(size * size) +
                        " row-major matrix entries, got " + std::to_string(l.params.size()));
    }
    aniso::Mat q(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) q(i, j) = l.params[i * size + j];
    return aniso::Lagrangian::quadratic_form(q);
  }
  return aniso::Lagrangian::angle_profile(l.n, model.p, l.params);
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["source"] = source;
  j["model"] = {{"kind", model.kind}, {"dim", model.dim}, {"p", model.p}, {"q", model.q}};
  j["lagrangian"] = {{"family", lagrangian.family}, {"n", lagrangian.n}, {"params", lagrangian.params}};
  j["surface"] = {{"chart", surface.chart},         {"radius", surface.radius},
                  {"resolution", surface.resolution}, {"base", surface.base},
                  {"factor", surface.factor},       {"amplitude", surface.amplitude},
                  {"big", surface.big},             {"small", surface.small},
                  {"axes", surface.axes}};
  nlohmann::ordered_json run_json = {{"seed", run.seed}, {"threads", run.threads}};
  run_json["tol"] = run.tol ? nlohmann::ordered_json(*run.tol) : nlohmann::ordered_json(nullptr);
  run_json["out"] = run.out;
  run_json["u"] = run.u;
  run_json["nodes"] = run.nodes;
  run_json["t_grid"] = run.t_grid;
  run_json["offset"] = run.offset ? nlohmann::ordered_json(*run.offset) : nlohmann::ordered_json(nullptr);
  run_json["variations"] = run.variations;
  run_json["mode"] = run.mode;
  run_json["steps"] = run.steps;
  run_json["dt"] = run.dt;
  run_json["degree"] = run.degree;
  run_json["samples"] = run.samples;
  run_json["step"] = run.step;
  j["run"] = run_json;
  return j;
}

}  // namespace cli
