#pragma once

#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace semieff::cli {

/// Asserted invariants of one run; any failure makes the tool exit with 2.
class Checks {
 public:
  void add(const std::string& name, bool ok, double value, double threshold);
  bool passed() const;
  json to_json() const;

 private:
  json items_ = json::array();
};

struct CommandOutput {
  json result = json::object();
  Checks checks;
  std::vector<std::pair<std::string, CsvTable>> tables;  // file name, table
};

const std::vector<std::string>& command_names();

/// Runs one subcommand; throws ConfigError for unknown names.
CommandOutput execute(const RunConfig& cfg);

}  // namespace semieff::cli
