#ifndef PENAPARAB_CONFIG_HPP
#define PENAPARAB_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "penaparab/pipeline.hpp"
#include "penaparab/solver.hpp"
#include "penaparab/verify.hpp"

namespace penaparab {

/// Syntax or schema problem in a configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  ProblemSpec spec;
  int nx = 32;
  int nt = 32;
  PenaltySchedule schedule;
  PicardOptions picard;
  /// Number of meshes in a convergence study (nx, nt doubled each time).
  int convergence_levels = 4;
  std::optional<ManufacturedCase> manufactured;
  std::optional<TransformOverride> transform;
  std::string output_dir = ".";
  bool write_mesh = false;
};

/// Validates against the strict schema; unknown keys are errors. With a
/// manufactured section the data fields are derived from ystar.
Config parse_config(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

}  // namespace penaparab

#endif  // PENAPARAB_CONFIG_HPP
