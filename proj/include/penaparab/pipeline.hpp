#ifndef PENAPARAB_PIPELINE_HPP
#define PENAPARAB_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "penaparab/transform.hpp"

namespace penaparab {

struct TransformOverride {
  double k1 = 0.0;
  double k2 = 0.0;
};

struct CertifyOptions {
  /// Grid for rho and the k1 requirement; should be finer than the mesh.
  SampleGrid grid{};
  std::optional<TransformOverride> constants;
  double k1_margin = 1.0;
};

/// Outcome of the hypothesis checks and the constant selection.
struct Certificate {
  double rho = 0.0;
  double eta = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double min_K = 0.0;
  /// min over the sample grid of the pointwise coercivity residual.
  double coercivity_margin = 0.0;
  bool sigma0_nonempty = false;
  bool sigma0_cylindrical = false;
  bool lipschitz_pass = false;
  bool slope_pass = false;
  bool width_pass = false;
  bool constants_overridden = false;
  std::vector<std::string> reasons;

  bool ok() const { return reasons.empty(); }
};

struct Prepared {
  Certificate certificate;
  /// Present iff the certificate is ok.
  std::optional<TransformedProblem> problem;
};

/// Runs every hypothesis check, selects (or validates overridden) k1, k2 and
/// builds the transformed problem. Never throws HypothesisError; failures
/// land in certificate.reasons.
Prepared prepare(const ProblemSpec& spec, const CertifyOptions& options = {});

/// Sample grid used for a mesh with nx x nt cells.
SampleGrid grid_for_mesh(int nx, int nt);

}  // namespace penaparab

#endif  // PENAPARAB_PIPELINE_HPP
