// Config loading and small problem builders shared by the test binaries.
#ifndef PENAPARAB_TESTS_HELPERS_HPP
#define PENAPARAB_TESTS_HELPERS_HPP

#include <filesystem>
#include <string>

#include "penaparab/config.hpp"
#include "penaparab/pipeline.hpp"

namespace helpers {

inline std::filesystem::path source_dir() { return PENAPARAB_SOURCE_DIR; }

inline std::filesystem::path config_path(const std::string& name) {
  return source_dir() / "configs" / (name + ".json");
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return source_dir() / "tests" / "fixtures" / (name + ".json");
}

inline penaparab::Config load(const std::string& name) {
  return penaparab::load_config(config_path(name));
}

inline penaparab::Config load_fixture(const std::string& name) {
  return penaparab::load_config(fixture_path(name));
}

/// Certified transformed problem for a config; throws if certification fails.
inline penaparab::TransformedProblem certified(const penaparab::Config& cfg) {
  penaparab::CertifyOptions opts;
  opts.grid = penaparab::grid_for_mesh(cfg.nx, cfg.nt);
  if (cfg.transform) opts.constants = cfg.transform;
  auto prepared = penaparab::prepare(cfg.spec, opts);
  if (!prepared.problem) {
    std::string why;
    for (const auto& r : prepared.certificate.reasons) why += r + "; ";
    throw std::runtime_error("certification failed: " + why);
  }
  return *prepared.problem;
}

inline penaparab::expr::Expr ex(const std::string& s) {
  return penaparab::expr::parse(s, penaparab::expr::kSpaceTime);
}

inline penaparab::expr::Expr ex_t(const std::string& s) {
  return penaparab::expr::parse(s, penaparab::expr::kTimeOnly);
}

/// Unit interval on [0, T] with one boundary kind per side and zero data.
inline penaparab::ProblemSpec unit_spec(penaparab::BcKind left, penaparab::BcKind right,
                                        double T = 1.0) {
  penaparab::ProblemSpec s;
  s.domain.a = ex_t("0");
  s.domain.b = ex_t("1");
  s.domain.T = T;
  s.partition.left = {{0.0, T, left}};
  s.partition.right = {{0.0, T, right}};
  return s;
}

}  // namespace helpers

#endif  // PENAPARAB_TESTS_HELPERS_HPP
