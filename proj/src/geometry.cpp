#include "penaparab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace penaparab {

const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }
const char* to_string(BcKind k) { return k == BcKind::Dirichlet ? "dirichlet" : "robin"; }

double MovingDomain::left_slope(double t) const {
  return expr::derivative_t(a, 0.0, t, expr::Window{0.0, T});
}

double MovingDomain::right_slope(double t) const {
  return expr::derivative_t(b, 0.0, t, expr::Window{0.0, T});
}

double MovingDomain::map_from_reference(double x_ref, double t) const {
  const double a0 = left(0.0);
  return left(t) + (x_ref - a0) * width(t) / width(0.0);
}

double MovingDomain::map_to_reference(double x, double t) const {
  const double a0 = left(0.0);
  return a0 + (x - left(t)) * width(0.0) / width(t);
}

DomainCheck check_domain(const MovingDomain& d, int samples) {
  DomainCheck out;
  out.min_width = std::numeric_limits<double>::infinity();
  if (!(d.T > 0.0) || !std::isfinite(d.T)) {
    out.finite_ok = false;
    out.reasons.push_back("horizon T must be positive and finite");
    return out;
  }
  for (int i = 0; i <= samples; ++i) {
    const double t = d.T * i / samples;
    double w = 0.0, sl = 0.0, sr = 0.0;
    try {
      w = d.width(t);
      sl = d.left_slope(t);
      sr = d.right_slope(t);
    } catch (const std::domain_error& e) {
      out.finite_ok = false;
      out.reasons.push_back(e.what());
      return out;
    }
    if (!std::isfinite(w)) {
      out.finite_ok = false;
      out.reasons.push_back("non-finite lateral curve at t=" + std::to_string(t));
      return out;
    }
    if (w < out.min_width) {
      out.min_width = w;
      out.worst_width_t = t;
    }
    const double s = std::max(std::abs(sl), std::abs(sr));
    if (s > out.max_slope) {
      out.max_slope = s;
      out.worst_slope_t = t;
    }
  }
  if (out.min_width < d.width_min) {
    out.width_ok = false;
    std::ostringstream msg;
    msg << "domain width " << out.min_width << " at t=" << out.worst_width_t
        << " is below width_min=" << d.width_min;
    out.reasons.push_back(msg.str());
  }
  if (out.max_slope > d.slope_max) {
    out.slope_ok = false;
    std::ostringstream msg;
    msg << "lateral slope " << out.max_slope << " at t=" << out.worst_slope_t
        << " exceeds slope_max=" << d.slope_max;
    out.reasons.push_back(msg.str());
  }
  return out;
}

BcKind BoundaryPartition::kind_at(Side s, double t) const {
  const auto& segs = side(s);
  if (segs.empty()) throw std::logic_error("empty boundary partition");
  for (std::size_t i = 0; i + 1 < segs.size(); ++i)
    if (t < segs[i].t1) return segs[i].kind;
  return segs.back().kind;
}

std::vector<double> BoundaryPartition::switch_times() const {
  std::vector<double> out;
  for (const auto* segs : {&left, &right})
    for (std::size_t i = 0; i + 1 < segs->size(); ++i)
      if ((*segs)[i].kind != (*segs)[i + 1].kind) out.push_back((*segs)[i].t1);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool BoundaryPartition::has_robin() const {
  for (const auto* segs : {&left, &right})
    for (const auto& s : *segs)
      if (s.kind == BcKind::Robin) return true;
  return false;
}

std::string PartitionReport::describe() const {
  std::ostringstream out;
  for (const auto& e : coverage_errors) out << e << "; ";
  for (const auto& iv : no_dirichlet)
    out << "no Dirichlet part on (" << iv.t0 << ", " << iv.t1 << "); ";
  std::string s = out.str();
  if (s.size() >= 2) s.resize(s.size() - 2);
  return s;
}

namespace {

void check_coverage(const std::vector<Segment>& segs, Side side, double T,
                    std::vector<std::string>& errors) {
  const std::string name = to_string(side);
  if (segs.empty()) {
    errors.push_back(name + " side has no segments");
    return;
  }
  const double tol = 1e-12 * std::max(1.0, T);
  if (std::abs(segs.front().t0) > tol)
    errors.push_back(name + " side does not start at t=0");
  if (std::abs(segs.back().t1 - T) > tol)
    errors.push_back(name + " side does not end at t=T");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!(segs[i].t0 < segs[i].t1))
      errors.push_back(name + " segment " + std::to_string(i) + " has t0 >= t1");
    if (i > 0 && std::abs(segs[i].t0 - segs[i - 1].t1) > tol)
      errors.push_back(name + " segments " + std::to_string(i - 1) + " and " +
                       std::to_string(i) + " leave a gap or overlap");
  }
}

}  // namespace

PartitionReport validate_partition(const MovingDomain& d, const BoundaryPartition& p) {
  PartitionReport rep;
  check_coverage(p.left, Side::Left, d.T, rep.coverage_errors);
  check_coverage(p.right, Side::Right, d.T, rep.coverage_errors);

  // Breakpoints of both sides split [0, T] into pieces of constant kinds.
  std::vector<double> cuts{0.0, d.T};
  for (const auto* segs : {&p.left, &p.right})
    for (const auto& s : *segs) {
      if (s.t0 > 0.0 && s.t0 < d.T) cuts.push_back(s.t0);
      if (s.t1 > 0.0 && s.t1 < d.T) cuts.push_back(s.t1);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto dirichlet_on = [](const std::vector<Segment>& segs, double mid) {
    for (const auto& s : segs)
      if (s.t0 <= mid && mid <= s.t1 && s.kind == BcKind::Dirichlet) return true;
    return false;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (dirichlet_on(p.left, mid) || dirichlet_on(p.right, mid)) continue;
    if (!rep.no_dirichlet.empty() && rep.no_dirichlet.back().t1 == cuts[i])
      rep.no_dirichlet.back().t1 = cuts[i + 1];
    else
      rep.no_dirichlet.push_back({cuts[i], cuts[i + 1]});
  }
  rep.ok = rep.coverage_errors.empty() && rep.no_dirichlet.empty();
  return rep;
}

bool is_sigma0_cylindrical(const BoundaryPartition& p) {
  auto constant_kind = [](const std::vector<Segment>& segs) {
    for (const auto& s : segs)
      if (s.kind != segs.front().kind) return false;
    return !segs.empty();
  };
  if (!constant_kind(p.left) || !constant_kind(p.right)) return false;
  return p.left.front().kind == BcKind::Dirichlet || p.right.front().kind == BcKind::Dirichlet;
}

LateralPoint lateral_from_slope(Side side, double t, double x, double slope) {
  LateralPoint lp;
  lp.side = side;
  lp.t = t;
  lp.x = x;
  lp.w_sigma = std::sqrt(1.0 + slope * slope);
  // Tangent (slope, 1) rotated to point away from the interior.
  if (side == Side::Left) {
    lp.n = -1.0;
    lp.nu_x = -1.0 / lp.w_sigma;
    lp.nu_t = slope / lp.w_sigma;
  } else {
    lp.n = 1.0;
    lp.nu_x = 1.0 / lp.w_sigma;
    lp.nu_t = -slope / lp.w_sigma;
  }
  return lp;
}

LateralPoint lateral_point(const MovingDomain& d, Side side, double t) {
  const double x = d.boundary(side, t);
  if (!std::isfinite(x))
    throw HypothesisError(std::string("non-finite ") + to_string(side) + " curve at t=" +
                          std::to_string(t));
  const double slope = d.slope(side, t);
  if (std::abs(slope) > d.slope_max)
    throw HypothesisError(std::string(to_string(side)) + " slope " + std::to_string(slope) +
                          " exceeds slope_max at t=" + std::to_string(t));
  return lateral_from_slope(side, t, x, slope);
}

}  // namespace penaparab
