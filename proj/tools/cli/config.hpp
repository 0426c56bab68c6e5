#pragma once

// Sectioned key = value run configuration. Every value remembers the line it
// came from so that type and consistency errors can point at it.

#include "aniso/errors.hpp"
#include "aniso/hypersurface.hpp"
#include "aniso/lagrangian.hpp"
#include "aniso/symspace.hpp"
#include "aniso/variational.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cli {

struct ConfigError : aniso::UsageError {
  using aniso::UsageError::UsageError;
};

class IniFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static IniFile parse(const std::string& text, const std::string& source);
  static IniFile load(const std::string& path);

  const Entry* find(const std::string& section, const std::string& key) const;
  /// Throws on any key not listed for its section, or on an unknown section.
  void require_known(const std::map<std::string, std::vector<std::string>>& allowed) const;
  [[noreturn]] void fail(const Entry* entry, const std::string& message) const;
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

struct ModelSpec {
  std::string kind = "sphere_product";  // euclidean | sphere_product | hyperbolic_product
  int dim = 3;                          // euclidean only
  int p = 2;
  int q = 2;
};

struct LagrangianSpec {
  std::string family = "angle_profile";  // constant | quadratic_form | angle_profile
  int n = 3;
  std::vector<double> params{1.0, 0.1};
};

struct SurfaceSpec {
  std::string chart = "sphere";  // sphere | tube | graph-over-sphere | torus | ellipsoid
  double radius = 0.3;
  int resolution = 16;
  std::string base = "factor";  // tube: factor | point
  int factor = 0;
  double amplitude = 0.1;
  double big = 1.0;
  double small = 0.4;
  std::vector<double> axes{1.0, 0.9, 0.8};
};

struct RunSpec {
  std::uint64_t seed = 20240917;
  unsigned threads = 0;
  std::optional<double> tol;
  std::string out = "aniso-out";
  std::vector<double> u;       // single node parameter; spread nodes when empty
  int nodes = 20;
  std::vector<double> t_grid;  // default: seven offsets in [-r/2, r/2]
  std::optional<double> offset;
  int variations = 5;
  std::string mode = "free";   // free | volume
  int steps = 10;
  double dt = 1e-3;
  int degree = 6;
  int samples = 2000;
  double step = 1e-4;          // finite-difference step of the first variation
};

struct RunConfig {
  std::string source = "<defaults>";
  ModelSpec model;
  LagrangianSpec lagrangian;
  SurfaceSpec surface;
  RunSpec run;

  /// Defaults, then the file (when given); consistency checks included.
  static RunConfig from_file(const std::optional<std::string>& path);

  aniso::AmbientModel make_model() const;
  aniso::Lagrangian make_lagrangian() const;
  double tolerance(double fallback) const { return run.tol.value_or(fallback); }
  nlohmann::ordered_json to_json() const;
};

}  // namespace cli
