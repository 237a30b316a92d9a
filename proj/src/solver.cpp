#include "penaparab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace penaparab {

PenaltySchedule::PenaltySchedule() : values_{1.0, 10.0, 100.0, 1000.0, 10000.0} {}

PenaltySchedule::PenaltySchedule(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("penalty schedule is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
      throw std::invalid_argument("penalty values must be positive and finite");
    if (i > 0 && !(values_[i] > values_[i - 1]))
      throw std::invalid_argument("penalty schedule must be strictly increasing");
  }
}

PenaltySchedule PenaltySchedule::coupled_to_mesh(int nx) {
  return PenaltySchedule({static_cast<double>(nx) * nx});
}

double l2_norm(const SpaceTimeMesh& mesh, std::span<const double> field) {
  double s = 0.0;
  for (int tri = 0; tri < static_cast<int>(mesh.triangles.size()); ++tri) {
    const auto& v = mesh.triangles[tri];
    const double area = mesh.signed_area(tri);
    // Edge midpoint values.
    const double m01 = 0.5 * (field[v[0]] + field[v[1]]);
    const double m12 = 0.5 * (field[v[1]] + field[v[2]]);
    const double m20 = 0.5 * (field[v[2]] + field[v[0]]);
    s += area / 3.0 * (m01 * m01 + m12 * m12 + m20 * m20);
  }
  return std::sqrt(s);
}

Energies compute_energies(const SpaceTimeMesh& mesh, std::span<const double> u, double m_penalty) {
  Energies e;
  for (int tri = 0; tri < static_cast<int>(mesh.triangles.size()); ++tri) {
    const TriangleRule r = triangle_rule(mesh, tri);
    const auto& v = mesh.triangles[tri];
    double ux = 0.0, ut = 0.0;
    for (int i = 0; i < 3; ++i) {
      ux += u[v[i]] * r.grad[i][0];
      ut += u[v[i]] * r.grad[i][1];
    }
    e.e_grad += r.area * ux * ux;
    e.e_pen += r.area * ut * ut;
  }
  e.e_pen /= m_penalty;
  for (const BoundaryEdge& be : mesh.boundary_edges) {
    if (be.tag != EdgeTag::Bottom && be.tag != EdgeTag::Top) continue;
    const EdgeRule r = edge_rule(mesh, be);
    double s = 0.0;
    for (int q = 0; q < 2; ++q) {
      const double val = r.lambda[q][0] * u[be.nodes[0]] + r.lambda[q][1] * u[be.nodes[1]];
      s += r.weights[q] * val * val;
    }
    (be.tag == EdgeTag::Bottom ? e.trace0 : e.traceT) += s;
  }
  return e;
}

namespace {

double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
  const auto ax = a.multiply(x);
  double rn = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) rn += (ax[i] - b[i]) * (ax[i] - b[i]);
  const double bn = norm2(b);
  return bn > 0.0 ? std::sqrt(rn) / bn : std::sqrt(rn);
}

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

NodalSolution solve_assembled(const SparseSystem& sys) {
  NodalSolution out;
  const LuSolveResult r = lu_solve(sys.matrix, sys.rhs);
  out.u = sys.expand(r.x);
  out.relative_residual = r.relative_residual;
  out.picard.iterations = 1;
  out.picard.gaps = {0.0};
  out.picard.converged = true;
  return out;
}

}  // namespace

NodalSolution solve_linear(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                           double m_penalty) {
  if (tp.semilinear()) throw std::invalid_argument("solve_linear called on a semilinear problem");
  return solve_assembled(assemble(tp, mesh, m_penalty));
}

NodalSolution solve_semilinear(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                               double m_penalty, double tol, int max_iter,
                               std::span<const double> initial) {
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  SparseSystem sys = assemble(tp, mesh, m_penalty, initial);
  if (!tp.nonlinear_term_depends_on_u()) return solve_assembled(sys);

  NodalSolution out;
  if (sys.size() == 0) {
    out.u = sys.lift;
    out.picard.converged = true;
    return out;
  }
  const BandLU lu(sys.matrix);
  std::vector<double> current =
      initial.empty() ? sys.lift : std::vector<double>(initial.begin(), initial.end());
  for (int it = 1; it <= max_iter; ++it) {
    const std::vector<double> rhs = it == 1 ? sys.rhs : assemble_rhs(sys, tp, mesh, current);
    const std::vector<double> x = lu.solve(rhs);
    const double res = relative_residual(sys.matrix, x, rhs);
    if (!(res <= kMaxRelativeResidual)) {
      std::ostringstream msg;
      msg << "linear solve residual " << res << " exceeds " << kMaxRelativeResidual;
      throw NumericalError(msg.str());
    }
    out.relative_residual = std::max(out.relative_residual, res);
    std::vector<double> next = sys.expand(x);
    const double gap = l2_norm(mesh, difference(next, current));
    out.picard.gaps.push_back(gap);
    out.picard.iterations = it;
    if (out.picard.gaps.size() >= 2) {
      const double prev = out.picard.gaps[out.picard.gaps.size() - 2];
      out.picard.ratio = prev > 0.0 ? gap / prev : 0.0;
    }
    current = std::move(next);
    if (gap <= tol) {
      out.picard.converged = true;
      break;
    }
  }
  out.u = std::move(current);
  if (!out.picard.converged) {
    std::ostringstream msg;
    msg << "Picard iteration did not reach tol " << tol << " in " << max_iter
        << " iterations (last gap " << out.picard.gaps.back() << ", ratio " << out.picard.ratio
        << "); the k1 margin may be too small or lipschitz_c understated";
    throw NumericalError(msg.str());
  }
  return out;
}

SolveReport run_schedule(const TransformedProblem& tp, const SpaceTimeMesh& mesh,
                         const PenaltySchedule& schedule, PicardOptions picard) {
  SolveReport report;
  try {
    for (double m : schedule.values()) {
      PenaltyStep step;
      step.m = m;
      NodalSolution sol;
      if (tp.semilinear()) {
        std::span<const double> warm;
        if (!report.steps.empty()) warm = report.steps.back().u;
        sol = solve_semilinear(tp, mesh, m, picard.tol, picard.max_iter, warm);
      } else {
        const SparseSystem sys = assemble(tp, mesh, m);
        report.stats = sys.stats;
        report.bandwidth = sys.bandwidth;
        sol = solve_assembled(sys);
      }
      step.u = std::move(sol.u);
      step.picard = std::move(sol.picard);
      step.relative_residual = sol.relative_residual;
      step.energies = compute_energies(mesh, step.u, m);
      if (!report.steps.empty())
        step.cauchy_gap = l2_norm(mesh, difference(step.u, report.steps.back().u));
      report.steps.push_back(std::move(step));
    }
    if (tp.semilinear()) {
      const SparseSystem sys = assemble(tp, mesh, schedule.values().back(), report.steps.back().u);
      report.stats = sys.stats;
      report.bandwidth = sys.bandwidth;
    }
  } catch (const NumericalError& e) {
    report.failure = e.what();
  }
  if (report.steps.empty()) return report;

  const auto& last = report.steps.back();
  report.y = inverse_transform(mesh.nodes, last.u, tp.phi(), tp.k1(), tp.k2());
  if (report.steps.size() >= 2) {
    const auto& prev = report.steps[report.steps.size() - 2];
    std::vector<double> extrap(last.u.size());
    const double denom = last.m - prev.m;
    for (std::size_t i = 0; i < extrap.size(); ++i)
      extrap[i] = (last.m * last.u[i] - prev.m * prev.u[i]) / denom;
    report.y_richardson = inverse_transform(mesh.nodes, extrap, tp.phi(), tp.k1(), tp.k2());
  }
  return report;
}

}  // namespace penaparab
