#ifndef PENAPARAB_COMMANDS_HPP
#define PENAPARAB_COMMANDS_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "penaparab/config.hpp"

namespace penaparab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitHypothesis = 2,
  kExitNumerical = 3,
};

/// Relative L2(Q) gap allowed between the penalized solution and the
/// finite-difference oracle.
inline constexpr double kOracleTolerance = 0.02;

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// PENAPARAB_THREADS: unset or 0 means hardware concurrency. Throws
/// ConfigError on malformed values.
int thread_count();

nlohmann::json certificate_json(const Certificate& c);

struct Invocation {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;
};

/// Runs one subcommand and returns its exit code. Messages go to `log`.
int run(const Invocation& inv, std::ostream& log);

}  // namespace penaparab::cli

#endif  // PENAPARAB_COMMANDS_HPP
