#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mfs/config.hpp"

namespace mfs::cli {

enum ExitStatus : int { kOk = 0, kValidation = 1, kNumerical = 2 };

using Cell = std::variant<double, long long, std::string, bool>;

/// A run's result: scalar summary plus an optional row table.
struct Artifact {
  json config;  // resolved, as echoed into the header
  std::string config_hash;
  std::uint64_t seed = 0;
  json summary = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// CSV: '# ' provenance lines, '# summary.<key>: <value>' lines, a header
/// row, then data rows; '.' decimals, ',' separators, LF endings.
std::string to_csv(const Artifact& a);
std::string to_json(const Artifact& a);

/// Reads the config hash back out of an emitted CSV or JSON file.
std::optional<std::string> read_config_hash(const std::string& path);

struct RunOptions {
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
};

/// Resolves, dispatches and emits. Returns the process exit status;
/// diagnostics go to err.
int run_config(const json& raw, const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Executes an already-resolved configuration and returns its artifact.
/// Library errors propagate.
Artifact execute(const json& resolved);

}  // namespace mfs::cli
