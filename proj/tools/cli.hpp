#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fermibox::cli {

// Effective configuration of one run. Everything a subcommand reads lives
// here, so a run can be written out as JSON and replayed exactly.
struct RunConfig {
  std::string command;
  double n = 1.0;
  double box = 1.0;
  double tau = 1.0;
  double tau_min = 0.1;
  double tau_max = 9.0;
  int steps = 200;
  double t = 0.0;
  double n_min = 0.0;  // 0: command default
  double n_max = 0.0;
  double length_cm = 2.5e-5;
  long long gamma_sq_max = 21;
  int levels = -1;  // -1: command default, 0: full spectrum, M: bottom M levels
  std::string format;  // empty: command default
  std::string output;
  std::string plot_dir;
  int jobs = 1;
  bool mark_onsets = false;
};

nlohmann::ordered_json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::ordered_json& j);

/// Fills command-dependent defaults (levels, format) and validates ranges.
/// Throws ValidationError.
RunConfig resolve(RunConfig config);

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Executes a resolved config. Tabular and JSON output goes to `out` unless
/// config.output is set, in which case the file is written atomically.
void execute(const RunConfig& config, std::ostream& out);

/// Full command line entry point; returns the process exit status
/// (0 success, 2 domain or usage error, 1 internal failure).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// %.9e with negative zero folded to zero.
std::string format_number(double value);

/// Resolves a relative output path against $FERMIBOX_OUTPUT_DIR when set.
std::filesystem::path output_path(const std::string& path);

/// Writes `text` to `path` through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace fermibox::cli
