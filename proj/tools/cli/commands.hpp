#pragma once

#include "config.hpp"

#include <json.hpp>

#include <string>

namespace cli {

struct Report {
  bool pass = true;
  std::string summary;            // one line for the terminal
  nlohmann::ordered_json result;  // command-specific body of the JSON report
  std::string csv;                // per-node or per-step table; empty when there is none
};

/// command is "group action" (e.g. "sphere spectrum") or "selftest".
Report run_command(const std::string& command, const RunConfig& config);

/// Writes <out>/<group>-<action>.json (and .csv) and returns the JSON path.
std::string write_report(const std::string& command, const RunConfig& config, const Report& report);

}  // namespace cli
