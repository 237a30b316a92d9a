#ifndef PENAPARAB_TRANSFORM_HPP
#define PENAPARAB_TRANSFORM_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "penaparab/expr.hpp"
#include "penaparab/geometry.hpp"

namespace penaparab {

/// Scalar function of (x, t): either a parsed expression or a callable.
class Field {
 public:
  Field() : Field(expr::Expr()) {}
  Field(expr::Expr e);  // NOLINT(google-explicit-constructor)
  Field(std::function<double(double, double)> fn, std::string label, bool depends_on_x = true,
        bool depends_on_t = true);

  double operator()(double x, double t) const { return fn_(x, t); }
  bool depends_on_x() const { return depends_on_x_; }
  bool depends_on_t() const { return depends_on_t_; }
  /// d/dx by Richardson-refined central differences (0 if x-independent).
  double dx(double x, double t) const;
  const std::string& label() const { return label_; }

 private:
  std::function<double(double, double)> fn_;
  std::string label_;
  bool depends_on_x_ = true;
  bool depends_on_t_ = true;
};

enum class ReactionKind { Linear, Semilinear };

/// Zeroth order term c(x, t, y). Linear: c0(x, t) * y.
class Reaction {
 public:
  Reaction() = default;
  static Reaction linear(Field c0);
  static Reaction semilinear(std::function<double(double, double, double)> c, std::string label,
                             bool depends_on_u = true);
  static Reaction semilinear(const expr::Expr& c);

  ReactionKind kind() const { return kind_; }
  bool is_linear() const { return kind_ == ReactionKind::Linear; }
  /// c0 for the linear kind.
  const Field& coefficient() const { return c0_; }
  double operator()(double x, double t, double y) const;
  bool depends_on_u() const { return kind_ == ReactionKind::Linear || depends_on_u_; }
  const std::string& label() const { return label_; }

 private:
  ReactionKind kind_ = ReactionKind::Linear;
  Field c0_;
  std::function<double(double, double, double)> c_;
  std::string label_ = "0";
  bool depends_on_u_ = true;
};

/// Problem data on the moving domain.
struct ProblemSpec {
  MovingDomain domain;
  BoundaryPartition partition;
  Field a11{expr::Expr::constant(1.0)};
  Field b1;
  Reaction c;
  double lipschitz_c = 0.0;
  Field k;
  Field g;
  Field f;
  Field ybar;
  Field y0;  ///< evaluated at t = 0
};

/// Sample grid over the closure of Q in reference coordinates: x = a(t) + s (b(t) - a(t)).
struct SampleGrid {
  int nx = 256;
  int nt = 256;
};

/// Evaluates `fn(x, t)` at every node of the sample grid.
void for_each_sample(const MovingDomain& d, SampleGrid grid,
                     const std::function<void(double x, double t)>& fn);

/// Minimum of a11 over the sample grid.
double estimate_rho(const ProblemSpec& spec, SampleGrid grid);

struct PhiValues {
  double value = 0.0;
  double dx = 0.0;
  double dxx = 0.0;
  double dt = 0.0;
};

/// phi(x, t) = psi(X^{-1}(t) x) with psi(x') = (x' - a(0)) (b(0) - x'), i.e.
/// phi = (x - a)(b - x) s^2 with s = (b(0) - a(0)) / (b(t) - a(t)).
/// Positive in Q, zero on the lateral curves, -d(phi)/dn = s^2 (b - a) there.
class AuxiliaryFunction {
 public:
  explicit AuxiliaryFunction(MovingDomain d);

  double value(double x, double t) const;
  /// Value and derivatives; the t-derivative uses numeric a'(t), b'(t).
  PhiValues at(double x, double t) const;
  /// d(phi)/dn on the curve of `side` at time t.
  double normal_derivative(Side side, double t) const;
  /// min over sampled lateral points of -d(phi)/dn.
  double eta() const { return eta_; }
  const MovingDomain& domain() const { return domain_; }

 private:
  MovingDomain domain_;
  double ref_width_ = 1.0;
  double eta_ = 0.0;
};

AuxiliaryFunction build_phi(const MovingDomain& d);

struct K2Selection {
  double k2 = 0.0;
  /// min K over the Robin samples with the selected k2 (+inf without Robin parts).
  double min_K = 0.0;
  int samples = 0;
};

/// Robin coefficient after the change of unknown:
/// K = k - k2 * d(phi)/dn * a11 * |nu_x|, where |nu_x| = 1 / sqrt(1 + slope^2)
/// is the spatial part of the space-time normal.
double transformed_robin(double k, double k2, double dphi_dn, double a11, double abs_nu_x);

/// Smallest k2 >= 0 (times 1.1) with K >= 1/2 at every sampled Robin point.
K2Selection select_k2(const ProblemSpec& spec, const AuxiliaryFunction& phi,
                      int samples = kDefaultTimeSamples);

/// Bracket M = a11_x phi_x - k2 a11 phi_x^2 + a11 phi_xx - b1 phi_x.
double bracket_m(double a11, double a11_x, double b1, const PhiValues& phi, double k2);

struct K1Selection {
  double k1 = 0.0;
  double rho = 0.0;
  /// Margin added on top of the sampled requirement.
  double margin = 1.0;
};

/// k1 <= 0 with -k1 >= max over the grid of
///   k2 phi_t - k2 M + lipschitz_c + B1^2 / rho + margin.
K1Selection select_k1(const ProblemSpec& spec, const AuxiliaryFunction& phi, double k2,
                      SampleGrid grid, double margin = 1.0);

/// Every coefficient of the transformed problem at one point.
struct PointCoefficients {
  double a11 = 0.0;
  double B1 = 0.0;
  double clin = 0.0;  ///< zeroth order coefficient kept in the matrix
  double residual = 0.0;  ///< clin (without c) - lipschitz_c - B1^2 / rho
  double G = 0.0;
  double exponent = 0.0;  ///< k1 t + k2 phi
};

/// Problem for u = exp(k1 t + k2 phi) y.
class TransformedProblem {
 public:
  TransformedProblem(ProblemSpec spec, AuxiliaryFunction phi, double k1, double k2, double rho);

  const ProblemSpec& spec() const { return spec_; }
  const AuxiliaryFunction& phi() const { return phi_; }
  double k1() const { return k1_; }
  double k2() const { return k2_; }
  double rho() const { return rho_; }
  bool semilinear() const { return !spec_.c.is_linear(); }
  /// Whether the lagged term Cnl actually depends on u.
  bool nonlinear_term_depends_on_u() const { return semilinear() && spec_.c.depends_on_u(); }

  double exponent(double x, double t) const { return k1_ * t + k2_ * phi_.value(x, t); }
  PointCoefficients at(double x, double t) const;
  double B1(double x, double t) const { return at(x, t).B1; }
  double clin(double x, double t) const { return at(x, t).clin; }
  double coercivity_residual(double x, double t) const { return at(x, t).residual; }
  double G(double x, double t) const { return at(x, t).G; }
  /// exp(k1 t + k2 phi) c(x, t, exp(-k1 t - k2 phi) u); zero for linear problems.
  double cnl(double x, double t, double u) const;
  double F(double x, double t) const;
  double ubar(double x, double t) const;
  double u0(double x) const;
  /// K on the Robin part; `abs_nu_x` comes from the (discrete) lateral normal.
  double K(Side side, double x, double t, double abs_nu_x) const;

 private:
  ProblemSpec spec_;
  AuxiliaryFunction phi_;
  double k1_;
  double k2_;
  double rho_;
};

TransformedProblem transform_problem(const ProblemSpec& spec, const AuxiliaryFunction& phi,
                                     double k1, double k2, double rho);

/// y = exp(-k1 t - k2 phi) u, nodewise.
std::vector<double> inverse_transform(std::span<const Point> nodes, std::span<const double> u,
                                      const AuxiliaryFunction& phi, double k1, double k2);

/// u = exp(k1 t + k2 phi) y, nodewise.
std::vector<double> forward_transform(std::span<const Point> nodes, std::span<const double> y,
                                      const AuxiliaryFunction& phi, double k1, double k2);

struct LipschitzCheck {
  bool pass = true;
  double max_quotient = 0.0;
  Point worst{};
  double worst_u = 0.0;
};

inline constexpr int kLipschitzSamples = 10000;
inline constexpr double kLipschitzURange = 10.0;

/// Samples |dc/du| by difference quotients at random (x, t, u) with
/// |u| <= kLipschitzURange and compares against lipschitz_c.
LipschitzCheck check_lipschitz(const ProblemSpec& spec, int samples = kLipschitzSamples,
                               std::uint64_t seed = 20240607);

}  // namespace penaparab

#endif  // PENAPARAB_TRANSFORM_HPP
