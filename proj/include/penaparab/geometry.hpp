#ifndef PENAPARAB_GEOMETRY_HPP
#define PENAPARAB_GEOMETRY_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "penaparab/expr.hpp"

namespace penaparab {

/// Raised when the data violates a hypothesis of the existence theory
/// (domain collapse, slope bound, missing Dirichlet part, ...).
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point (x, t) of space-time.
struct Point {
  double x = 0.0;
  double t = 0.0;
};

enum class Side { Left, Right };
enum class BcKind { Dirichlet, Robin };

const char* to_string(Side s);
const char* to_string(BcKind k);

/// Moving interval (a(t), b(t)) on [0, T].
struct MovingDomain {
  expr::Expr a;
  expr::Expr b;
  double T = 1.0;
  double slope_max = 10.0;
  double width_min = 1e-3;

  double left(double t) const { return a(0.0, t); }
  double right(double t) const { return b(0.0, t); }
  double width(double t) const { return right(t) - left(t); }
  double left_slope(double t) const;
  double right_slope(double t) const;
  double boundary(Side s, double t) const { return s == Side::Left ? left(t) : right(t); }
  double slope(Side s, double t) const { return s == Side::Left ? left_slope(t) : right_slope(t); }
  bool is_static() const { return !a.uses(expr::Var::t) && !b.uses(expr::Var::t); }

  /// The affine diffeomorphism X(t): Omega(0) -> Omega(t) and its inverse.
  double map_from_reference(double x_ref, double t) const;
  double map_to_reference(double x, double t) const;
};

inline constexpr int kDefaultTimeSamples = 4096;

struct DomainCheck {
  bool width_ok = true;
  bool slope_ok = true;
  bool finite_ok = true;
  double min_width = 0.0;
  double max_slope = 0.0;
  double worst_width_t = 0.0;
  double worst_slope_t = 0.0;
  std::vector<std::string> reasons;
  bool ok() const { return width_ok && slope_ok && finite_ok; }
};

/// Samples width and lateral slopes on a uniform t-grid.
DomainCheck check_domain(const MovingDomain& d, int samples = kDefaultTimeSamples);

struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  BcKind kind = BcKind::Dirichlet;
};

/// Per-side, piecewise constant in time assignment of boundary kinds.
struct BoundaryPartition {
  std::vector<Segment> left;
  std::vector<Segment> right;

  const std::vector<Segment>& side(Side s) const { return s == Side::Left ? left : right; }
  /// Kind on `s` at time t; segments are half open [t0, t1) except the last.
  BcKind kind_at(Side s, double t) const;
  /// Sorted interior switch times of both sides.
  std::vector<double> switch_times() const;
  bool has_robin() const;
};

struct Interval {
  double t0 = 0.0;
  double t1 = 0.0;
};

struct PartitionReport {
  bool ok = true;
  /// Time intervals on which neither side is Dirichlet.
  std::vector<Interval> no_dirichlet;
  /// Coverage defects (gaps, overlaps, bad ordering).
  std::vector<std::string> coverage_errors;
  std::string describe() const;
};

PartitionReport validate_partition(const MovingDomain& d, const BoundaryPartition& p);

/// Each side has a single kind over [0, T] and at least one side is Dirichlet.
bool is_sigma0_cylindrical(const BoundaryPartition& p);

/// Normal data at a point of a lateral curve.
struct LateralPoint {
  Side side = Side::Left;
  double t = 0.0;
  double x = 0.0;
  double n = -1.0;  ///< spatial outward normal
  double nu_x = -1.0;
  double nu_t = 0.0;  ///< cos of the angle between nu and the t axis
  double w_sigma = 1.0;  ///< d(sigma)/dt
  double cos_nu_t() const { return nu_t; }
};

/// Outward space-time normal of a lateral curve with slope dx/dt = `slope`.
LateralPoint lateral_from_slope(Side side, double t, double x, double slope);

LateralPoint lateral_point(const MovingDomain& d, Side side, double t);

}  // namespace penaparab

#endif  // PENAPARAB_GEOMETRY_HPP
