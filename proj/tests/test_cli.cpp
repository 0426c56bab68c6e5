#include "commands.hpp"
#include "config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "aniso-cli-test";
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const std::string& name, const std::string& text) {
  const fs::path path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string error_of(const std::string& text) {
  try {
    cli::RunConfig::from_file(write_config("case.ini", text));
  } catch (const cli::ConfigError& e) {
    return e.what();
  }
  return "";
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(ANISO_TOOL) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST(Ini, ParsesSectionsCommentsAndLines) {
  const auto ini = cli::IniFile::parse("# header\n[Model]\nkind = euclidean ; trailing\n\n dim=3\n", "x");
  ASSERT_NE(ini.find("model", "kind"), nullptr);
  EXPECT_EQ(ini.find("model", "kind")->value, "euclidean");
  EXPECT_EQ(ini.find("model", "kind")->line, 3);
  EXPECT_EQ(ini.find("model", "dim")->line, 5);
  EXPECT_EQ(ini.find("model", "p"), nullptr);
}

TEST(Ini, SyntaxErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      cli::IniFile::parse(text, "cfg");
    } catch (const cli::ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("[model]\nkind euclidean\n").find("cfg:2:"), std::string::npos);
  EXPECT_NE(message("kind = euclidean\n").find("cfg:1:"), std::string::npos);
  EXPECT_NE(message("[model\n").find("cfg:1:"), std::string::npos);
  EXPECT_NE(message("[a]\nx=1\nx=2\n").find("cfg:3: duplicate"), std::string::npos);
}

TEST(Config, DefaultsAreConsistent) {
  const auto c = cli::RunConfig::from_file(std::nullopt);
  EXPECT_EQ(c.make_model().tangent_dim(), c.lagrangian.n + 1);
  EXPECT_NO_THROW(c.make_lagrangian());
}

TEST(Config, ValueErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("[model]\nkind = euclidean\ndim = three\n").find(":3: dim"), std::string::npos);
  EXPECT_NE(error_of("[surface]\n\nresolution = 8\n").find(":3: resolution must be at least 16"),
            std::string::npos);
  EXPECT_NE(error_of("[run]\ntol = -1\n").find(":2: tol must be positive"), std::string::npos);
  EXPECT_NE(error_of("[run]\nbogus = 1\n").find(":2: unknown key"), std::string::npos);
  EXPECT_NE(error_of("[nope]\n").find(":1: unknown section"), std::string::npos);
  EXPECT_NE(error_of("[model]\nkind = torus\n").find("must be one of"), std::string::npos);
}

TEST(Config, QuadraticFormWithSphereProductNamesBothBlocks) {
  const std::string msg = error_of(
      "[model]\nkind = sphere_product\np = 2\nq = 2\n[lagrangian]\nfamily = quadratic_form\n"
      "params = 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1\n");
  EXPECT_NE(msg.find("[lagrangian] family = quadratic_form (line 6)"), std::string::npos) << msg;
  EXPECT_NE(msg.find("[model] kind = sphere_product (line 2)"), std::string::npos) << msg;
}

TEST(Config, DimensionMismatch) {
  EXPECT_NE(error_of("[model]\nkind = euclidean\ndim = 3\n[lagrangian]\nn = 3\n").find("dim T_pM - 1 = 2"),
            std::string::npos);
}

TEST(Commands, SphereSpectrumReportEmbedsConfigAndVersion) {
  auto config = cli::RunConfig::from_file(write_config(
      "spectrum.ini",
      "[model]\nkind = sphere_product\n[lagrangian]\nfamily = constant\n[surface]\nradius = 0.3\n"
      "[run]\nu = 0.7853981633974483 0.2 0.9\n"));
  config.run.out = (scratch() / "out").string();
  const auto report = cli::run_command("sphere spectrum", config);
  EXPECT_TRUE(report.pass);
  const auto& node = report.result["nodes"][0];
  EXPECT_EQ(node["numeric"].size(), 3u);
  EXPECT_EQ(node["closed_form"].size(), 3u);
  EXPECT_EQ(node["delta"].size(), 3u);
  const std::string path = cli::write_report("sphere spectrum", config, report);
  const auto doc = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(doc["version"], ANISO_VERSION);
  EXPECT_EQ(doc["config"]["lagrangian"]["family"], "constant");
  EXPECT_EQ(doc["config"]["surface"]["radius"], 0.3);
}

TEST(Commands, CsvIsDeterministic) {
  auto config = cli::RunConfig::from_file(std::nullopt);
  config.run.variations = 2;
  config.surface.chart = "torus";
  config.model = {"euclidean", 3, 2, 2};
  config.lagrangian = {"constant", 2, {1.0}};
  config.surface.resolution = 16;
  const auto a = cli::run_command("verify variation", config);
  const auto b = cli::run_command("verify variation", config);
  EXPECT_FALSE(a.csv.empty());
  EXPECT_EQ(a.csv, b.csv);
  config.run.seed += 1;
  EXPECT_NE(cli::run_command("verify variation", config).csv, a.csv);
}

TEST(Commands, UnknownCommand) {
  EXPECT_THROW(cli::run_command("sphere nothing", cli::RunConfig::from_file(std::nullopt)),
               aniso::UsageError);
}

TEST(Tool, ExitCodes) {
  const std::string out = (scratch() / "tool").string();
  EXPECT_EQ(run_tool("sphere afr --out " + out), 0);
  EXPECT_EQ(run_tool("verify critical --out " + out), 1);
  const std::string bad = write_config(
      "bad.ini", "[model]\nkind = hyperbolic_product\n[lagrangian]\nfamily = quadratic_form\nn = 3\n");
  EXPECT_EQ(run_tool("sphere build --config " + bad), 2);
  EXPECT_EQ(run_tool("sphere"), 2);
  EXPECT_EQ(run_tool("--threads x sphere build"), 2);
  const std::string big = write_config("big.ini", "[surface]\nradius = 1.5\n");
  EXPECT_EQ(run_tool("sphere build --config " + big + " --out " + out), 2);
  // Offset that is not a focal radius: the collapse keeps full rank.
  const std::string nonfocal = write_config(
      "nonfocal.ini", "[surface]\nbase = point\nradius = 0.3\n[run]\noffset = -0.1\nnodes = 10\n");
  EXPECT_EQ(run_tool("tube reconstruct --config " + nonfocal + " --out " + out), 3);
}

TEST(Tool, EnvironmentOverridesConfig) {
  const std::string out = (scratch() / "env").string();
  fs::remove_all(out);
  const std::string cmd = "ANISO_OUT=" + out + " ANISO_SEED=7 " + std::string(ANISO_TOOL) +
                          " lagrangian check > /dev/null 2>&1";
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  const auto doc = nlohmann::json::parse(slurp(fs::path(out) / "lagrangian-check.json"));
  EXPECT_EQ(doc["config"]["run"]["seed"], 7);
}
