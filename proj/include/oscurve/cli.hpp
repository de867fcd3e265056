#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oscurve::cli {

/// Invalid command line or configuration; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command;
  /// Named parameters as given ("n", "alpha", "delta-grid", ...).
  std::map<std::string, std::string> params;
  std::string output;         ///< empty or "-" writes to stdout
  std::string format = "csv"; ///< csv or json
};

const std::vector<std::string>& commands();

/// Parses "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config_text(std::string_view text);

/// argv parsing; --config FILE is read first and flags override it.
ExperimentConfig parse_command_line(int argc, const char* const* argv);

/// Every parameter of the command with defaults filled in, in a fixed order.
/// Throws UsageError for unknown or malformed parameters.
std::vector<std::pair<std::string, std::string>> resolve(const ExperimentConfig& config);

/// FNV-1a checksum over the command, format and resolved parameters.
std::string config_checksum(const ExperimentConfig& config);

/// Runs the experiment and returns the artifact text.
std::string render(const ExperimentConfig& config);

/// Full front end: parse, run, write. Returns the process exit status.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oscurve::cli
