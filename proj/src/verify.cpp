#include "penaparab/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace penaparab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Second x-derivative: central difference with one Richardson step.
double second_derivative_x(const expr::Expr& e, double x, double t) {
  auto d2 = [&](double h) { return (e(x + h, t) - 2.0 * e(x, t) + e(x - h, t)) / (h * h); };
  const double h = 1e-3;
  return (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
}

bool close(double numeric, double supplied) {
  return std::abs(numeric - supplied) <= kConsistencyTolerance * (1.0 + std::abs(supplied));
}

}  // namespace

ConsistencyReport check_consistency(const ManufacturedCase& mc, const MovingDomain& d, int samples,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ConsistencyReport out;
  const expr::Window window{0.0, d.T};
  for (int i = 0; i < samples; ++i) {
    const double t = d.T * unit(rng);
    const double x = d.left(t) + d.width(t) * (0.05 + 0.9 * unit(rng));
    struct Check {
      const char* name;
      double numeric;
      double supplied;
    };
    const Check checks[] = {
        {"ystar_x", expr::derivative_x(mc.ystar, x, t), mc.ystar_x(x, t)},
        {"ystar_t", expr::derivative_t(mc.ystar, x, t, window), mc.ystar_t(x, t)},
        {"ystar_xx", second_derivative_x(mc.ystar, x, t), mc.ystar_xx(x, t)},
    };
    for (const Check& c : checks) {
      const double rel = std::abs(c.numeric - c.supplied) / (1.0 + std::abs(c.supplied));
      if (!std::isfinite(rel)) {
        out.worst_relative = std::numeric_limits<double>::infinity();
      } else {
        out.worst_relative = std::max(out.worst_relative, rel);
      }
      if (out.ok && !(close(c.numeric, c.supplied))) {
        out.ok = false;
        std::ostringstream msg;
        msg << c.name << " disagrees with numeric differentiation of ystar at x=" << x
            << ", t=" << t << ": supplied " << c.supplied << ", numeric " << c.numeric;
        out.detail = msg.str();
      }
    }
  }
  return out;
}

ProblemSpec derive_data(const ManufacturedCase& mc, ProblemSpec skeleton) {
  const ConsistencyReport cr = check_consistency(mc, skeleton.domain);
  if (!cr.ok) throw ConsistencyError(cr.detail);

  const auto y = mc.ystar;
  const auto yx = mc.ystar_x;
  const auto yt = mc.ystar_t;
  const auto yxx = mc.ystar_xx;
  const Field a11 = skeleton.a11;
  const Field b1 = skeleton.b1;
  const Reaction c = skeleton.c;
  const Field k = skeleton.k;
  const MovingDomain d = skeleton.domain;

  skeleton.g = Field(
      [=](double x, double t) {
        const double v = y(x, t);
        const double vx = yx(x, t);
        return yt(x, t) - a11(x, t) * yxx(x, t) - a11.dx(x, t) * vx + b1(x, t) * vx +
               c(x, t, v);
      },
      "g from ystar");
  skeleton.f = Field(
      [=](double x, double t) {
        const double mid = 0.5 * (d.left(t) + d.right(t));
        const Side side = x < mid ? Side::Left : Side::Right;
        const double n = side == Side::Left ? -1.0 : 1.0;
        const double s = d.slope(side, t);
        const double nu_x = n / std::sqrt(1.0 + s * s);
        return k(x, t) * y(x, t) + a11(x, t) * nu_x * yx(x, t);
      },
      "f from ystar");
  skeleton.ybar = Field(y);
  skeleton.y0 = Field([=](double x, double) { return y(x, 0.0); }, "ystar(x, 0)", true, false);
  return skeleton;
}

ErrorReport error_norms(const SpaceTimeMesh& mesh, std::span<const double> y_h,
                        const ManufacturedCase& mc) {
  ErrorReport out;
  for (int tri = 0; tri < static_cast<int>(mesh.triangles.size()); ++tri) {
    const TriangleRule r = triangle_rule(mesh, tri);
    const auto& v = mesh.triangles[tri];
    double gx = 0.0;
    for (int i = 0; i < 3; ++i) gx += y_h[v[i]] * r.grad[i][0];
    for (int q = 0; q < 3; ++q) {
      const Point& p = r.points[q];
      double yh = 0.0;
      for (int i = 0; i < 3; ++i) yh += r.lambda[q][i] * y_h[v[i]];
      const double e = yh - mc.ystar(p.x, p.t);
      const double ex = gx - mc.ystar_x(p.x, p.t);
      out.l2 += r.weight * e * e;
      out.energy += r.weight * ex * ex;
    }
  }
  for (const BoundaryEdge& be : mesh.boundary_edges) {
    if (be.tag != EdgeTag::Sigma1) continue;
    const EdgeRule r = edge_rule(mesh, be);
    for (int q = 0; q < 2; ++q) {
      const Point& p = r.points[q];
      const double yh = r.lambda[q][0] * y_h[be.nodes[0]] + r.lambda[q][1] * y_h[be.nodes[1]];
      const double e = yh - mc.ystar(p.x, p.t);
      out.sigma1 += r.weights[q] * e * e;
    }
  }
  out.l2 = std::sqrt(out.l2);
  out.energy = std::sqrt(out.energy);
  out.sigma1 = std::sqrt(out.sigma1);
  return out;
}

std::vector<double> observed_orders(std::span<const double> errors) {
  std::vector<double> out;
  if (errors.size() < 3) return out;
  for (std::size_t i = 1; i < errors.size(); ++i)
    out.push_back(std::log2(errors[i - 1] / errors[i]));
  return out;
}

std::vector<double> fd_oracle(const ProblemSpec& spec, int nx, std::span<const double> levels) {
  const MovingDomain& d = spec.domain;
  if (!d.is_static()) throw std::invalid_argument("fd_oracle needs a static domain");
  if (!spec.c.is_linear()) throw std::invalid_argument("fd_oracle needs a linear reaction");
  if (nx < 2 || levels.size() < 2) throw std::invalid_argument("fd_oracle needs nx >= 2 and two levels");

  const double a = d.left(0.0);
  const double h = d.width(0.0) / nx;
  const int n = nx + 1;
  auto xs = [&](int j) { return j == nx ? d.right(0.0) : a + h * j; };

  std::vector<double> out(levels.size() * n);
  for (int j = 0; j < n; ++j) out[j] = spec.y0(xs(j), 0.0);

  std::vector<double> lo(n), di(n), up(n), rhs(n);
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double t = levels[k];
    const double dt = t - levels[k - 1];
    const double* prev = &out[(k - 1) * n];
    for (int j = 0; j < n; ++j) {
      const double x = xs(j);
      const double a11 = spec.a11(x, t);
      const double p = spec.b1(x, t) - spec.a11.dx(x, t);
      const double c0 = spec.c.coefficient()(x, t);
      lo[j] = -a11 / (h * h) - p / (2.0 * h);
      up[j] = -a11 / (h * h) + p / (2.0 * h);
      di[j] = 1.0 / dt + 2.0 * a11 / (h * h) + c0;
      rhs[j] = prev[j] / dt + spec.g(x, t);
    }
    // Boundary rows: Dirichlet replaces the row, Robin eliminates the ghost node.
    for (Side side : {Side::Left, Side::Right}) {
      const int j = side == Side::Left ? 0 : nx;
      const double x = xs(j);
      if (spec.partition.kind_at(side, t) == BcKind::Dirichlet) {
        lo[j] = up[j] = 0.0;
        di[j] = 1.0;
        rhs[j] = spec.ybar(x, t);
        continue;
      }
      const double a11 = spec.a11(x, t);
      const double k = spec.k(x, t);
      const double f = spec.f(x, t);
      if (side == Side::Left) {
        // -a11 y_x + k y = f  =>  y_{-1} = y_1 - 2h (k y_0 - f) / a11
        up[j] += lo[j];
        di[j] -= lo[j] * 2.0 * h * k / a11;
        rhs[j] -= lo[j] * 2.0 * h * f / a11;
        lo[j] = 0.0;
      } else {
        // a11 y_x + k y = f  =>  y_{N+1} = y_{N-1} + 2h (f - k y_N) / a11
        lo[j] += up[j];
        di[j] -= up[j] * 2.0 * h * k / a11;
        rhs[j] -= up[j] * 2.0 * h * f / a11;
        up[j] = 0.0;
      }
    }
    // Thomas algorithm.
    for (int j = 1; j < n; ++j) {
      if (di[j - 1] == 0.0) throw NumericalError("singular tridiagonal system in fd_oracle");
      const double w = lo[j] / di[j - 1];
      di[j] -= w * up[j - 1];
      rhs[j] -= w * rhs[j - 1];
    }
    double* cur = &out[k * n];
    if (di[n - 1] == 0.0) throw NumericalError("singular tridiagonal system in fd_oracle");
    cur[n - 1] = rhs[n - 1] / di[n - 1];
    for (int j = n - 2; j >= 0; --j) cur[j] = (rhs[j] - up[j] * cur[j + 1]) / di[j];
  }
  return out;
}

std::vector<double> fd_oracle(const ProblemSpec& spec, int nx, int nt) {
  if (nt < 1) throw std::invalid_argument("fd_oracle needs nt >= 1");
  std::vector<double> levels(nt + 1);
  for (int k = 0; k <= nt; ++k) levels[k] = k == nt ? spec.domain.T : spec.domain.T * k / nt;
  return fd_oracle(spec, nx, levels);
}

std::vector<Verdict> diagnostics(const SolveReport& report, DiagnosticThresholds th) {
  const auto& s = report.steps;
  if (s.size() < 3) throw std::invalid_argument("diagnostics need at least 3 penalty values");
  std::vector<Verdict> out;
  std::ostringstream detail;

  {
    Verdict v{"penalty_energy_vanishing", true, {}};
    for (std::size_t i = 2; i < s.size(); ++i)
      if (s[i].energies.e_pen > s[i - 1].energies.e_pen) {
        v.pass = false;
        detail << "E_pen increases from m=" << s[i - 1].m << " to m=" << s[i].m << "; ";
      }
    const double first = s[1].energies.e_pen;
    const double last = s.back().energies.e_pen;
    if (!(last <= first / th.pen_decay)) {
      v.pass = false;
      detail << "E_pen(" << s.back().m << ")=" << last << " > E_pen(" << s[1].m << ")/"
             << th.pen_decay;
    }
    v.detail = detail.str();
    out.push_back(std::move(v));
  }

  auto spread = [&](const char* name, auto get) {
    Verdict v{name, true, {}};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    int count = 0;
    for (const auto& step : s) {
      if (step.m < th.spread_from_m) continue;
      lo = std::min(lo, get(step));
      hi = std::max(hi, get(step));
      ++count;
    }
    std::ostringstream msg;
    if (count == 0) {
      v.pass = false;
      msg << "no penalty value >= " << th.spread_from_m;
    } else {
      v.pass = hi <= th.spread * lo || hi == 0.0;
      msg << "max/min = " << (lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : kNaN));
    }
    v.detail = msg.str();
    out.push_back(std::move(v));
  };
  spread("grad_energy_bounded", [](const PenaltyStep& p) { return p.energies.e_grad; });
  spread("trace0_bounded", [](const PenaltyStep& p) { return p.energies.trace0; });
  spread("traceT_bounded", [](const PenaltyStep& p) { return p.energies.traceT; });

  {
    Verdict v{"cauchy_gaps_decreasing", true, {}};
    std::ostringstream msg;
    for (std::size_t i = 2; i < s.size(); ++i) {
      const double g0 = s[i - 1].cauchy_gap, g1 = s[i].cauchy_gap;
      const bool ok = g1 < g0 || g1 <= th.gap_floor;
      if (!ok) {
        v.pass = false;
        msg << "gap at m=" << s[i].m << " (" << g1 << ") >= gap at m=" << s[i - 1].m << " (" << g0
            << "); ";
      }
    }
    v.detail = msg.str();
    out.push_back(std::move(v));
  }
  return out;
}

double coercivity_constant(const QuadraticFormParts& parts, const SpaceTimeMesh& mesh,
                           int iterations) {
  const CsrMatrix sym = parts.full.symmetric_part();
  std::vector<int> dof(mesh.nodes.size(), -1);
  int n = 0;
  for (std::size_t i = 0; i < dof.size(); ++i)
    if (!mesh.is_dirichlet[i]) dof[i] = n++;
  TripletList free;
  for (int i = 0; i < sym.rows; ++i) {
    if (dof[i] < 0) continue;
    for (int p = sym.row_ptr[i]; p < sym.row_ptr[i + 1]; ++p)
      if (dof[sym.col[p]] >= 0) free.add(dof[i], dof[sym.col[p]], sym.val[p]);
  }
  const CsrMatrix a = free.build(n, n);
  if (n == 0) return std::numeric_limits<double>::infinity();
  const BandCholesky chol(a);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = unit(rng);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    std::vector<double> w = chol.solve(v);
    lambda = 1.0 / dot(v, w);  // Rayleigh quotient of the inverse
    v = std::move(w);
  }
  const double nv = norm2(v);
  for (double& x : v) x /= nv;
  return std::min(lambda, a.quadratic(v));
}

double relative_l2_gap(const SpaceTimeMesh& mesh, std::span<const double> a,
                       std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double nb = l2_norm(mesh, b);
  const double nd = l2_norm(mesh, d);
  return nb > 0.0 ? nd / nb : nd;
}

std::vector<ConvergenceRow> convergence_study(const ProblemSpec& spec, const ManufacturedCase& mc,
                                              const ConvergenceOptions& options) {
  const std::size_t count = options.levels.size();
  std::vector<ConvergenceRow> rows(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        const auto start = std::chrono::steady_clock::now();
        const auto [nx, nt] = options.levels[i];
        CertifyOptions co;
        co.grid = grid_for_mesh(nx, nt);
        co.constants = options.constants;
        const Prepared prep = prepare(spec, co);
        if (!prep.certificate.ok()) {
          std::ostringstream msg;
          for (const auto& r : prep.certificate.reasons) msg << r << "; ";
          throw HypothesisError(msg.str());
        }
        const SpaceTimeMesh mesh = build_mesh(spec.domain, spec.partition, nx, nt);
        const PenaltySchedule sched = PenaltySchedule::coupled_to_mesh(nx);
        const SolveReport rep = run_schedule(*prep.problem, mesh, sched, options.picard);
        if (rep.failure) throw NumericalError(*rep.failure);
        ConvergenceRow& row = rows[i];
        row.nx = nx;
        row.nt = nt;
        row.m = sched.values().back();
        row.errors = error_norms(mesh, rep.y, mc);
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(count)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t i = 0; i < count; ++i)
    rows[i].observed_order =
        (i == 0 || count < 3) ? kNaN : std::log2(rows[i - 1].errors.l2 / rows[i].errors.l2);
  return rows;
}

}  // namespace penaparab
