#include "penaparab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace penaparab {

namespace {

double min_robin_K(const ProblemSpec& spec, const AuxiliaryFunction& phi, double k2) {
  double out = std::numeric_limits<double>::infinity();
  const MovingDomain& d = spec.domain;
  for (Side side : {Side::Left, Side::Right})
    for (const Segment& seg : spec.partition.side(side)) {
      if (seg.kind != BcKind::Robin) continue;
      const int n = std::max(
          2, static_cast<int>(std::ceil(kDefaultTimeSamples * (seg.t1 - seg.t0) / d.T)));
      for (int i = 0; i <= n; ++i) {
        const double t = seg.t0 + (seg.t1 - seg.t0) * i / n;
        const LateralPoint lp = lateral_point(d, side, t);
        out = std::min(out, transformed_robin(spec.k(lp.x, t), k2, phi.normal_derivative(side, t),
                                              spec.a11(lp.x, t), std::abs(lp.nu_x)));
      }
    }
  return out;
}

double min_residual(const TransformedProblem& tp, SampleGrid grid) {
  double out = std::numeric_limits<double>::infinity();
  for_each_sample(tp.spec().domain, grid,
                  [&](double x, double t) { out = std::min(out, tp.coercivity_residual(x, t)); });
  return out;
}

}  // namespace

SampleGrid grid_for_mesh(int nx, int nt) {
  return {std::max(64, 4 * nx), std::max(64, 4 * nt)};
}

Prepared prepare(const ProblemSpec& spec, const CertifyOptions& options) {
  Prepared out;
  Certificate& c = out.certificate;
  auto fail = [&](std::string why) { c.reasons.push_back(std::move(why)); };

  const DomainCheck dc = check_domain(spec.domain);
  c.width_pass = dc.width_ok && dc.finite_ok;
  c.slope_pass = dc.slope_ok && dc.finite_ok;
  for (const auto& r : dc.reasons) fail(r);

  const PartitionReport pr = validate_partition(spec.domain, spec.partition);
  c.sigma0_nonempty = pr.no_dirichlet.empty();
  c.sigma0_cylindrical = is_sigma0_cylindrical(spec.partition);
  if (!pr.ok) fail(pr.describe());
  if (!spec.c.is_linear() && !c.sigma0_cylindrical)
    fail(
        "semilinear reaction requires a cylindrical Dirichlet part (the Dirichlet/Robin "
        "assignment of each side may not switch in time)");

  if (!dc.ok() || !pr.ok) return out;

  try {
    c.rho = estimate_rho(spec, options.grid);
    if (!(c.rho > 0.0)) {
      std::ostringstream msg;
      msg << "a11 is not uniformly positive: rho = " << c.rho;
      fail(msg.str());
      return out;
    }

    const LipschitzCheck lc = check_lipschitz(spec);
    c.lipschitz_pass = lc.pass;
    if (!lc.pass) {
      std::ostringstream msg;
      msg << "reaction is not Lipschitz with the declared constant " << spec.lipschitz_c
          << ": |dc/dy| reaches " << lc.max_quotient << " at x=" << lc.worst.x
          << ", t=" << lc.worst.t << ", y=" << lc.worst_u;
      fail(msg.str());
    }

    const AuxiliaryFunction phi = build_phi(spec.domain);
    c.eta = phi.eta();

    if (options.constants) {
      c.constants_overridden = true;
      c.k1 = options.constants->k1;
      c.k2 = options.constants->k2;
    } else {
      c.k2 = select_k2(spec, phi).k2;
      c.k1 = select_k1(spec, phi, c.k2, options.grid, options.k1_margin).k1;
    }
    c.min_K = min_robin_K(spec, phi, c.k2);
    if (c.min_K < 0.5) {
      std::ostringstream msg;
      msg << "transformed Robin coefficient K = " << c.min_K << " < 1/2 with k2 = " << c.k2;
      fail(msg.str());
    }

    TransformedProblem tp = transform_problem(spec, phi, c.k1, c.k2, c.rho);
    c.coercivity_margin = min_residual(tp, options.grid);
    if (!(c.coercivity_margin >= 0.0)) {
      std::ostringstream msg;
      msg << "coercivity residual is negative (" << c.coercivity_margin << ") with k1 = " << c.k1
          << ", k2 = " << c.k2;
      fail(msg.str());
    }
    if (c.ok()) out.problem.emplace(std::move(tp));
  } catch (const HypothesisError& e) {
    fail(e.what());
  }
  return out;
}

}  // namespace penaparab
