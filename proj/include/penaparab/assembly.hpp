#ifndef PENAPARAB_ASSEMBLY_HPP
#define PENAPARAB_ASSEMBLY_HPP

#include <span>
#include <vector>

#include "penaparab/mesh.hpp"
#include "penaparab/sparse.hpp"
#include "penaparab/transform.hpp"

namespace penaparab {

/// Extremes of the transformed coefficients seen at the quadrature points.
struct AssemblyStats {
  double min_K = 0.0;  ///< over Robin edge points; +inf without Robin edges
  double min_residual = 0.0;  ///< coercivity residual over triangle points
  double min_a11 = 0.0;
};

/// Penalised space-time system on the free (non-Dirichlet) nodes.
struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  /// rhs without the lagged nonlinear load.
  std::vector<double> rhs_linear;
  std::vector<int> dof_of_node;  ///< -1 for Dirichlet nodes
  std::vector<int> node_of_dof;
  /// ubar at Dirichlet nodes, 0 elsewhere.
  std::vector<double> lift;
  int bandwidth = 0;
  AssemblyStats stats;

  int size() const { return static_cast<int>(node_of_dof.size()); }
  /// Nodal field from free values plus the lift.
  std::vector<double> expand(std::span<const double> free_values) const;
};

/// The bilinear form, for P1 trial u and test v vanishing on Dirichlet nodes,
///   (1/m)(u_t, v_t) - (u, v_t) + (a11 u_x, v_x) + (B1 u_x, v) + (Clin u, v)
///   + <(cos(nu,t) + K) u, v>_{Sigma1} + (u(T), v(T))
/// and the load (u0, v(0)) + (G, v) + <F, v>_{Sigma1} - (Cnl(u_prev), v).
/// `u_prev` is a nodal field (empty means zero); only used by semilinear problems.
SparseSystem assemble(const TransformedProblem& tp, const SpaceTimeMesh& mesh, double m_penalty,
                      std::span<const double> u_prev = {});

/// Free-dof load for a new linearisation point; the matrix is unchanged.
std::vector<double> assemble_rhs(const SparseSystem& sys, const TransformedProblem& tp,
                                 const SpaceTimeMesh& mesh, std::span<const double> u_prev);

/// Pieces of the form on all mesh nodes.
struct QuadraticFormParts {
  CsrMatrix time_stiffness;  ///< (u_t, v_t)
  CsrMatrix x_stiffness;  ///< (a11 u_x, v_x)
  CsrMatrix x_stiffness_unit;  ///< (u_x, v_x)
  CsrMatrix time_derivative;  ///< -(u, v_t)
  CsrMatrix bottom_mass;  ///< (u(0), v(0))
  CsrMatrix top_mass;  ///< (u(T), v(T))
  CsrMatrix lateral_cos;  ///< <cos(nu,t) u, v> over the whole lateral boundary
  CsrMatrix rest;  ///< full - time_stiffness / m - x_stiffness
  CsrMatrix full;
  double m_penalty = 1.0;
};

QuadraticFormParts quadratic_form_parts(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                                        double m_penalty);

}  // namespace penaparab

#endif  // PENAPARAB_ASSEMBLY_HPP
