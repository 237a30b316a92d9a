#ifndef PENAPARAB_SOLVER_HPP
#define PENAPARAB_SOLVER_HPP

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "penaparab/assembly.hpp"
#include "penaparab/band_lu.hpp"

namespace penaparab {

/// Strictly increasing positive penalty parameters.
class PenaltySchedule {
 public:
  PenaltySchedule();  ///< {1, 10, 100, 1000, 10000}
  explicit PenaltySchedule(std::vector<double> values);
  /// m = nx^2, the coupling used when m is tied to mesh refinement.
  static PenaltySchedule coupled_to_mesh(int nx);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

struct PicardHistory {
  int iterations = 0;
  std::vector<double> gaps;  ///< L2(Q) norm of successive differences
  double ratio = 0.0;  ///< last gap ratio (0 with fewer than two gaps)
  bool converged = false;
};

struct NodalSolution {
  std::vector<double> u;
  PicardHistory picard;
  double relative_residual = 0.0;  ///< worst linear solve residual
};

/// L2(Q) norm of a nodal P1 field (exact for P1 via the midpoint rule).
double l2_norm(const SpaceTimeMesh& mesh, std::span<const double> field);

struct Energies {
  double e_pen = 0.0;  ///< (1/m) int |u_t|^2
  double e_grad = 0.0;  ///< int |u_x|^2
  double trace0 = 0.0;  ///< |u(., 0)|^2
  double traceT = 0.0;  ///< |u(., T)|^2
};

Energies compute_energies(const SpaceTimeMesh& mesh, std::span<const double> u, double m_penalty);

NodalSolution solve_linear(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                           double m_penalty);

/// Lagged iteration u_{j+1} = solve(assemble(u_j)); stops when the L2(Q) gap
/// is <= tol. Starts from `initial` (the Dirichlet lift when empty).
NodalSolution solve_semilinear(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                               double m_penalty, double tol, int max_iter,
                               std::span<const double> initial = {});

struct PenaltyStep {
  double m = 0.0;
  std::vector<double> u;
  Energies energies;
  /// ||u^{m_i} - u^{m_{i-1}}||_{L2(Q)}; NaN for the first entry.
  double cauchy_gap = std::numeric_limits<double>::quiet_NaN();
  PicardHistory picard;
  double relative_residual = 0.0;
};

struct SolveReport {
  std::vector<PenaltyStep> steps;
  /// Largest-m solution mapped back to y.
  std::vector<double> y;
  /// Extrapolation of y assuming an O(1/m) penalty error (needs >= 2 steps).
  std::vector<double> y_richardson;
  AssemblyStats stats;
  int bandwidth = 0;
  std::optional<std::string> failure;
};

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 30;
};

/// Solves for every m of the schedule, warm-starting Picard at the previous
/// m. Solver failures are recorded in `failure` with the steps done so far.
SolveReport run_schedule(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                         const PenaltySchedule& schedule, PicardOptions picard = {});

}  // namespace penaparab

#endif  // PENAPARAB_SOLVER_HPP
