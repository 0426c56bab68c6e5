#include "commands.hpp"

#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumeric = 3 };

const std::vector<std::pair<std::string, std::vector<std::string>>> kCommands{
    {"lagrangian", {"check"}},
    {"sphere", {"build", "spectrum", "afr"}},
    {"tube", {"build", "spectrum", "afr", "check-equifocal", "check-isoparametric", "reconstruct"}},
    {"verify", {"variation", "critical"}},
    {"flow", {"run"}},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic surface energies on symmetric spaces", "aniso"};
  app.set_version_flag("--version", ANISO_VERSION);
  app.require_subcommand(1);

  std::optional<std::string> config_path, out;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  app.add_option("--config", config_path, "Run configuration file")->envname("ANISO_CONFIG");
  app.add_option("--out", out, "Output directory for reports")->envname("ANISO_OUT");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->envname("ANISO_THREADS");
  app.add_option("--seed", seed, "Seed for all randomized sampling")->envname("ANISO_SEED");
  app.add_option("--tol", tol, "Pass/fail tolerance of the command")
      ->envname("ANISO_TOL")
      ->check(CLI::PositiveNumber);

  std::string command;
  for (const auto& [group, actions] : kCommands) {
    auto* sub = app.add_subcommand(group)->require_subcommand(1)->fallthrough();
    for (const auto& action : actions) {
      sub->add_subcommand(action)->fallthrough()->callback(
          [&command, g = group, a = action] { command = g + " " + a; });
    }
  }
  app.add_subcommand("selftest", "Run every acceptance criterion")->fallthrough()->callback([&] {
    command = "selftest";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    cli::RunConfig config = cli::RunConfig::from_file(config_path);
    if (out) config.run.out = *out;
    if (threads) config.run.threads = *threads;
    if (seed) config.run.seed = *seed;
    if (tol) config.run.tol = *tol;
    aniso::set_thread_count(config.run.threads);

    const cli::Report report = cli::run_command(command, config);
    const std::string path = cli::write_report(command, config, report);
    std::cout << (report.pass ? "PASS" : "FAIL") << "  " << command << ": " << report.summary
              << "\n      report: " << path << std::endl;
    return report.pass ? kPass : kCheckFailed;
  } catch (const aniso::NumericError& e) {
    std::cerr << "aniso " << command << ": numeric error: " << e.what() << std::endl;
    return kNumeric;
  } catch (const aniso::Error& e) {
    std::cerr << "aniso " << command << ": " << e.what() << std::endl;
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "aniso " << command << ": " << e.what() << std::endl;
    return kNumeric;
  }
}
