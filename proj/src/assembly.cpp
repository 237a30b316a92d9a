#include "penaparab/assembly.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace penaparab {

namespace {

// Optional per-term sinks; `full` always receives the complete form.
struct Sinks {
  TripletList full;
  bool split = false;
  TripletList tt, sx, sxu, dt, bottom, top, lateral_cos;
};

void require_finite(double v, const char* what, const Point& p) {
  if (std::isfinite(v)) return;
  std::ostringstream msg;
  msg << "non-finite " << what << " at x=" << p.x << ", t=" << p.t;
  throw HypothesisError(msg.str());
}

void integrate_linear(const TransformedProblem& tp, const SpaceTimeMesh& mesh, double m_penalty,
                      Sinks& sinks, std::vector<double>& load, AssemblyStats& stats) {
  if (!(m_penalty > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
  const double inv_m = 1.0 / m_penalty;
  load.assign(mesh.nodes.size(), 0.0);
  stats.min_K = std::numeric_limits<double>::infinity();
  stats.min_residual = std::numeric_limits<double>::infinity();
  stats.min_a11 = std::numeric_limits<double>::infinity();
  sinks.full.reserve(9 * mesh.triangles.size() + 4 * mesh.boundary_edges.size());

  for (int tri = 0; tri < static_cast<int>(mesh.triangles.size()); ++tri) {
    const TriangleRule r = triangle_rule(mesh, tri);
    const auto& v = mesh.triangles[tri];
    std::array<PointCoefficients, 3> pc;
    for (int q = 0; q < 3; ++q) {
      pc[q] = tp.at(r.points[q].x, r.points[q].t);
      require_finite(pc[q].a11, "a11", r.points[q]);
      require_finite(pc[q].B1, "B1", r.points[q]);
      require_finite(pc[q].clin, "zeroth order coefficient", r.points[q]);
      require_finite(pc[q].G, "G", r.points[q]);
      stats.min_residual = std::min(stats.min_residual, pc[q].residual);
      stats.min_a11 = std::min(stats.min_a11, pc[q].a11);
    }
    for (int i = 0; i < 3; ++i) {
      const double gxi = r.grad[i][0], gti = r.grad[i][1];
      for (int j = 0; j < 3; ++j) {
        const double gxj = r.grad[j][0], gtj = r.grad[j][1];
        double sx = 0.0, conv = 0.0, mass = 0.0, lam_j = 0.0;
        for (int q = 0; q < 3; ++q) {
          const double li = r.lambda[q][i], lj = r.lambda[q][j];
          sx += pc[q].a11;
          conv += pc[q].B1 * li;
          mass += pc[q].clin * li * lj;
          lam_j += lj;
        }
        const double tt = r.area * gti * gtj;
        sx *= r.weight * gxi * gxj;
        conv *= r.weight * gxj;
        mass *= r.weight;
        const double dt = -gti * r.weight * lam_j;
        sinks.full.add(v[i], v[j], inv_m * tt + sx + dt + conv + mass);
        if (sinks.split) {
          sinks.tt.add(v[i], v[j], tt);
          sinks.sx.add(v[i], v[j], sx);
          sinks.sxu.add(v[i], v[j], r.area * gxi * gxj);
          sinks.dt.add(v[i], v[j], dt);
        }
      }
      double g = 0.0;
      for (int q = 0; q < 3; ++q) g += pc[q].G * r.lambda[q][i];
      load[v[i]] += r.weight * g;
    }
  }

  for (const BoundaryEdge& e : mesh.boundary_edges) {
    const EdgeRule r = edge_rule(mesh, e);
    std::array<std::array<double, 2>, 2> local{};
    switch (e.tag) {
      case EdgeTag::Bottom: {
        for (int q = 0; q < 2; ++q) {
          const double u0 = tp.u0(r.points[q].x);
          require_finite(u0, "u0", r.points[q]);
          for (int i = 0; i < 2; ++i) load[e.nodes[i]] += r.weights[q] * u0 * r.lambda[q][i];
        }
        if (sinks.split)
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
              double s = 0.0;
              for (int q = 0; q < 2; ++q) s += r.weights[q] * r.lambda[q][i] * r.lambda[q][j];
              sinks.bottom.add(e.nodes[i], e.nodes[j], s);
            }
        break;
      }
      case EdgeTag::Top: {
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int q = 0; q < 2; ++q) s += r.weights[q] * r.lambda[q][i] * r.lambda[q][j];
            sinks.full.add(e.nodes[i], e.nodes[j], s);
            if (sinks.split) sinks.top.add(e.nodes[i], e.nodes[j], s);
          }
        break;
      }
      case EdgeTag::Sigma0:
      case EdgeTag::Sigma1: {
        const double cos_nu = r.normal.nu_t;
        if (sinks.split)
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
              double s = 0.0;
              for (int q = 0; q < 2; ++q)
                s += r.weights[q] * cos_nu * r.lambda[q][i] * r.lambda[q][j];
              sinks.lateral_cos.add(e.nodes[i], e.nodes[j], s);
            }
        if (e.tag == EdgeTag::Sigma0) break;
        const double abs_nu_x = std::abs(r.normal.nu_x);
        for (int q = 0; q < 2; ++q) {
          const Point& p = r.points[q];
          const double K = tp.K(e.side, p.x, p.t, abs_nu_x);
          const double F = tp.F(p.x, p.t);
          require_finite(K, "K", p);
          require_finite(F, "F", p);
          stats.min_K = std::min(stats.min_K, K);
          if (K < 0.5 - 1e-12) {
            std::ostringstream msg;
            msg << "transformed Robin coefficient K=" << K << " < 1/2 at x=" << p.x
                << ", t=" << p.t << " (" << to_string(e.side) << " side)";
            throw HypothesisError(msg.str());
          }
          for (int i = 0; i < 2; ++i) {
            load[e.nodes[i]] += r.weights[q] * F * r.lambda[q][i];
            for (int j = 0; j < 2; ++j)
              local[i][j] += r.weights[q] * (cos_nu + K) * r.lambda[q][i] * r.lambda[q][j];
          }
        }
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) sinks.full.add(e.nodes[i], e.nodes[j], local[i][j]);
        break;
      }
    }
  }
}

// (Cnl(u_prev), v) on all nodes.
std::vector<double> nonlinear_load(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                                   std::span<const double> u_prev) {
  std::vector<double> out(mesh.nodes.size(), 0.0);
  if (!tp.semilinear()) return out;
  if (!u_prev.empty() && u_prev.size() != mesh.nodes.size())
    throw std::invalid_argument("linearisation field does not match mesh");
  for (int tri = 0; tri < static_cast<int>(mesh.triangles.size()); ++tri) {
    const TriangleRule r = triangle_rule(mesh, tri);
    const auto& v = mesh.triangles[tri];
    for (int q = 0; q < 3; ++q) {
      double u = 0.0;
      if (!u_prev.empty())
        for (int i = 0; i < 3; ++i) u += r.lambda[q][i] * u_prev[v[i]];
      const double c = tp.cnl(r.points[q].x, r.points[q].t, u);
      require_finite(c, "nonlinear term", r.points[q]);
      for (int i = 0; i < 3; ++i) out[v[i]] += r.weight * c * r.lambda[q][i];
    }
  }
  return out;
}

}  // namespace

std::vector<double> SparseSystem::expand(std::span<const double> free_values) const {
  std::vector<double> out = lift;
  for (int d = 0; d < size(); ++d) out[node_of_dof[d]] = free_values[d];
  return out;
}

SparseSystem assemble(const TransformedProblem& tp, const SpaceTimeMesh& mesh, double m_penalty,
                      std::span<const double> u_prev) {
  Sinks sinks;
  std::vector<double> load;
  SparseSystem sys;
  integrate_linear(tp, mesh, m_penalty, sinks, load, sys.stats);
  const int n = static_cast<int>(mesh.nodes.size());
  const CsrMatrix full = sinks.full.build(n, n);

  sys.dof_of_node.assign(n, -1);
  sys.lift.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (mesh.is_dirichlet[i]) {
      const Point& p = mesh.nodes[i];
      sys.lift[i] = tp.ubar(p.x, p.t);
      require_finite(sys.lift[i], "Dirichlet data", p);
    } else {
      sys.dof_of_node[i] = static_cast<int>(sys.node_of_dof.size());
      sys.node_of_dof.push_back(i);
    }
  }

  TripletList free;
  free.reserve(full.val.size());
  sys.rhs_linear.assign(sys.size(), 0.0);
  for (int d = 0; d < sys.size(); ++d) {
    const int i = sys.node_of_dof[d];
    double r = load[i];
    for (int p = full.row_ptr[i]; p < full.row_ptr[i + 1]; ++p) {
      const int j = full.col[p];
      if (sys.dof_of_node[j] >= 0)
        free.add(d, sys.dof_of_node[j], full.val[p]);
      else
        r -= full.val[p] * sys.lift[j];
    }
    sys.rhs_linear[d] = r;
  }
  sys.matrix = free.build(sys.size(), sys.size());
  if (!sys.matrix.all_finite()) throw HypothesisError("non-finite matrix entry");
  sys.bandwidth = sys.matrix.bandwidth();
  sys.rhs = assemble_rhs(sys, tp, mesh, u_prev);
  return sys;
}

std::vector<double> assemble_rhs(const SparseSystem& sys, const TransformedProblem& tp,
                                 const SpaceTimeMesh& mesh, std::span<const double> u_prev) {
  std::vector<double> rhs = sys.rhs_linear;
  if (!tp.semilinear()) return rhs;
  const auto nl = nonlinear_load(tp, mesh, u_prev);
  for (int d = 0; d < sys.size(); ++d) rhs[d] -= nl[sys.node_of_dof[d]];
  return rhs;
}

QuadraticFormParts quadratic_form_parts(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                                        double m_penalty) {
  Sinks sinks;
  sinks.split = true;
  std::vector<double> load;
  AssemblyStats stats;
  integrate_linear(tp, mesh, m_penalty, sinks, load, stats);
  const int n = static_cast<int>(mesh.nodes.size());
  QuadraticFormParts parts;
  parts.m_penalty = m_penalty;
  parts.full = sinks.full.build(n, n);
  parts.time_stiffness = sinks.tt.build(n, n);
  parts.x_stiffness = sinks.sx.build(n, n);
  parts.x_stiffness_unit = sinks.sxu.build(n, n);
  parts.time_derivative = sinks.dt.build(n, n);
  parts.bottom_mass = sinks.bottom.build(n, n);
  parts.top_mass = sinks.top.build(n, n);
  parts.lateral_cos = sinks.lateral_cos.build(n, n);
  parts.rest = add(add(parts.full, parts.time_stiffness, 1.0, -1.0 / m_penalty),
                   parts.x_stiffness, 1.0, -1.0);
  return parts;
}

}  // namespace penaparab
