#ifndef PENAPARAB_VERIFY_HPP
#define PENAPARAB_VERIFY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "penaparab/mesh.hpp"
#include "penaparab/pipeline.hpp"
#include "penaparab/solver.hpp"
#include "penaparab/transform.hpp"

namespace penaparab {

/// Manufactured solution with hand-supplied derivatives.
struct ManufacturedCase {
  expr::Expr ystar;
  expr::Expr ystar_x;
  expr::Expr ystar_t;
  expr::Expr ystar_xx;
};

/// A supplied derivative disagrees with numeric differentiation of ystar.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConsistencyReport {
  bool ok = true;
  double worst_relative = 0.0;
  std::string detail;
};

inline constexpr double kConsistencyTolerance = 1e-5;

/// Compares the supplied derivatives with numeric ones at random points of Q.
ConsistencyReport check_consistency(const ManufacturedCase& mc, const MovingDomain& d,
                                    int samples = 100, std::uint64_t seed = 7);

/// Fills g, f, ybar, y0 of `skeleton` from ystar. The Robin datum is
/// f = k ystar + a11 nu_x ystar_x with nu_x = n / sqrt(1 + slope^2).
ProblemSpec derive_data(const ManufacturedCase& mc, ProblemSpec skeleton);

struct ErrorReport {
  double l2 = 0.0;
  /// L2(Q) norm of the x-derivative of the error.
  double energy = 0.0;
  /// L2(Sigma_1) norm of the error.
  double sigma1 = 0.0;
};

ErrorReport error_norms(const SpaceTimeMesh& mesh, std::span<const double> y_h,
                        const ManufacturedCase& mc);

/// log2(e_{i-1} / e_i) for consecutive pairs; empty with fewer than 3 levels.
std::vector<double> observed_orders(std::span<const double> errors);

/// Backward Euler / centred differences on the static domain, on the given
/// time levels and nx + 1 uniform points. Result uses mesh node ordering.
std::vector<double> fd_oracle(const ProblemSpec& spec, int nx, std::span<const double> levels);
std::vector<double> fd_oracle(const ProblemSpec& spec, int nx, int nt);

struct DiagnosticThresholds {
  /// E_pen(last) <= E_pen(second) / pen_decay.
  double pen_decay = 10.0;
  /// max / min of E_grad and traces over m >= spread_from_m.
  double spread = 1.5;
  double spread_from_m = 100.0;
  /// Cauchy gaps at or below this are rounding noise and count as converged.
  double gap_floor = 1e-12;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Penalty diagnostics; throws std::invalid_argument with fewer than 3 steps.
std::vector<Verdict> diagnostics(const SolveReport& report, DiagnosticThresholds th = {});

/// Smallest eigenvalue of the symmetric part of `parts.full` restricted to
/// the non-Dirichlet nodes, by inverse iteration on its band Cholesky factor.
/// Throws NumericalError when the restriction is not positive definite.
double coercivity_constant(const QuadraticFormParts& parts, const SpaceTimeMesh& mesh,
                           int iterations = 60);

/// Relative L2(Q) difference ||a - b|| / ||b|| (absolute when ||b|| = 0).
double relative_l2_gap(const SpaceTimeMesh& mesh, std::span<const double> a,
                       std::span<const double> b);

struct ConvergenceRow {
  int nx = 0;
  int nt = 0;
  double m = 0.0;
  ErrorReport errors;
  /// Order from the previous row; NaN for the first.
  double observed_order = 0.0;
  double seconds = 0.0;
};

struct ConvergenceOptions {
  /// (nx, nt) per mesh; m = nx^2 on each.
  std::vector<std::array<int, 2>> levels{{8, 8}, {16, 16}, {32, 32}, {64, 64}};
  std::optional<TransformOverride> constants;
  PicardOptions picard{};
  int threads = 1;
};

/// Solves the manufactured problem on each level with m = nx^2.
/// Throws HypothesisError if certification fails and NumericalError on
/// solver failure.
std::vector<ConvergenceRow> convergence_study(const ProblemSpec& spec, const ManufacturedCase& mc,
                                              const ConvergenceOptions& options);

}  // namespace penaparab

#endif  // PENAPARAB_VERIFY_HPP
