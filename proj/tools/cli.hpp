#pragma once
// Command-line front end: config resolution, data I/O and the five
// subcommands. Commands take a fully resolved JSON config and return the
// JSON document they print, so tests can drive them without a process.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace arfima::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kNumerical = 4 };

/// Defaults for a command; every accepted key appears here.
json default_config(const std::string& command);

/// Merge `user` over the defaults, rejecting keys the command does not know.
/// A previously emitted result document is accepted in place of a bare
/// config (its "config" member is used).
json resolve_config(const std::string& command, const json& user);

std::vector<double> read_series_csv(const std::string& path);
void write_series_csv(const std::string& path, const std::vector<double>& x, bool header);

json cmd_simulate(const json& config);
json cmd_fit(const json& config);  ///< dispatches to rjfit when rj.enabled
json cmd_rjfit(const json& config);
json cmd_estimate(const json& config);
json cmd_mcstudy(const json& config);

/// Map an exception to an exit code.
int exit_code_for(const std::exception& e);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace arfima::cli
