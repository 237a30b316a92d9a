#include "penaparab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace penaparab {

Field::Field(expr::Expr e)
    : label_(e.source()),
      depends_on_x_(e.uses(expr::Var::x)),
      depends_on_t_(e.uses(expr::Var::t)) {
  fn_ = [e = std::move(e)](double x, double t) { return e(x, t); };
}

Field::Field(std::function<double(double, double)> fn, std::string label, bool depends_on_x,
             bool depends_on_t)
    : fn_(std::move(fn)),
      label_(std::move(label)),
      depends_on_x_(depends_on_x),
      depends_on_t_(depends_on_t) {}

double Field::dx(double x, double t) const {
  if (!depends_on_x_) return 0.0;
  constexpr double h = expr::kDefaultDiffStep;
  auto central = [&](double step) { return (fn_(x + step, t) - fn_(x - step, t)) / (2.0 * step); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

Reaction Reaction::linear(Field c0) {
  Reaction r;
  r.kind_ = ReactionKind::Linear;
  r.label_ = c0.label();
  r.c0_ = std::move(c0);
  return r;
}

Reaction Reaction::semilinear(std::function<double(double, double, double)> c, std::string label,
                              bool depends_on_u) {
  Reaction r;
  r.kind_ = ReactionKind::Semilinear;
  r.c_ = std::move(c);
  r.label_ = std::move(label);
  r.depends_on_u_ = depends_on_u;
  return r;
}

Reaction Reaction::semilinear(const expr::Expr& c) {
  return semilinear([c](double x, double t, double u) { return c.eval({x, t, u}); }, c.source(),
                    c.uses(expr::Var::u));
}

double Reaction::operator()(double x, double t, double y) const {
  if (kind_ == ReactionKind::Linear) return c0_(x, t) * y;
  return c_(x, t, y);
}

void for_each_sample(const MovingDomain& d, SampleGrid grid,
                     const std::function<void(double, double)>& fn) {
  for (int j = 0; j <= grid.nt; ++j) {
    const double t = d.T * j / grid.nt;
    const double a = d.left(t);
    const double w = d.width(t);
    for (int i = 0; i <= grid.nx; ++i) fn(a + w * i / grid.nx, t);
  }
}

double estimate_rho(const ProblemSpec& spec, SampleGrid grid) {
  double rho = std::numeric_limits<double>::infinity();
  for_each_sample(spec.domain, grid, [&](double x, double t) {
    const double v = spec.a11(x, t);
    if (!std::isfinite(v)) throw HypothesisError("non-finite a11 sample");
    rho = std::min(rho, v);
  });
  return rho;
}

AuxiliaryFunction::AuxiliaryFunction(MovingDomain d) : domain_(std::move(d)) {
  ref_width_ = domain_.width(0.0);
  const DomainCheck check = check_domain(domain_);
  if (!check.finite_ok) throw HypothesisError(check.reasons.front());
  if (!check.width_ok) throw HypothesisError(check.reasons.front());
  eta_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kDefaultTimeSamples; ++i) {
    const double t = domain_.T * i / kDefaultTimeSamples;
    for (Side s : {Side::Left, Side::Right}) eta_ = std::min(eta_, -normal_derivative(s, t));
  }
}

double AuxiliaryFunction::value(double x, double t) const {
  const double a = domain_.left(t);
  const double b = domain_.right(t);
  const double s = ref_width_ / (b - a);
  return (x - a) * (b - x) * s * s;
}

PhiValues AuxiliaryFunction::at(double x, double t) const {
  const double a = domain_.left(t);
  const double b = domain_.right(t);
  const double w = b - a;
  const double c = ref_width_ * ref_width_;
  PhiValues out;
  out.value = c * (x - a) * (b - x) / (w * w);
  out.dx = c * (a + b - 2.0 * x) / (w * w);
  out.dxx = -2.0 * c / (w * w);
  if (domain_.is_static()) return out;
  const double da = domain_.left_slope(t);
  const double db = domain_.right_slope(t);
  out.dt = c * (-da * (b - x) + (x - a) * db) / (w * w) -
           2.0 * c * (x - a) * (b - x) * (db - da) / (w * w * w);
  return out;
}

double AuxiliaryFunction::normal_derivative(Side /*side*/, double t) const {
  // phi_x(a) = c / w, n = -1; phi_x(b) = -c / w, n = +1.
  return -ref_width_ * ref_width_ / domain_.width(t);
}

AuxiliaryFunction build_phi(const MovingDomain& d) {
  AuxiliaryFunction phi(d);
  if (!(phi.eta() > 0.0)) throw HypothesisError("auxiliary function has non-positive eta");
  return phi;
}

double transformed_robin(double k, double k2, double dphi_dn, double a11, double abs_nu_x) {
  return k - k2 * dphi_dn * a11 * abs_nu_x;
}

K2Selection select_k2(const ProblemSpec& spec, const AuxiliaryFunction& phi, int samples) {
  if (!(phi.eta() > 0.0)) throw HypothesisError("auxiliary function has non-positive eta");
  const MovingDomain& d = spec.domain;

  struct RobinSample {
    double k;
    double gain;  // dK/dk2
  };
  std::vector<RobinSample> pts;
  for (Side side : {Side::Left, Side::Right}) {
    for (const Segment& seg : spec.partition.side(side)) {
      if (seg.kind != BcKind::Robin) continue;
      const int n = std::max(2, static_cast<int>(std::ceil(samples * (seg.t1 - seg.t0) / d.T)));
      for (int i = 0; i <= n; ++i) {
        const double t = seg.t0 + (seg.t1 - seg.t0) * i / n;
        const LateralPoint lp = lateral_point(d, side, t);
        const double k = spec.k(lp.x, t);
        const double a11 = spec.a11(lp.x, t);
        if (!std::isfinite(k) || !std::isfinite(a11))
          throw HypothesisError("non-finite Robin coefficient sample");
        const double gain =
            -phi.normal_derivative(side, t) * a11 * std::abs(lp.nu_x);
        pts.push_back({k, gain});
      }
    }
  }

  K2Selection out;
  out.samples = static_cast<int>(pts.size());
  if (pts.empty()) {
    out.min_K = std::numeric_limits<double>::infinity();
    return out;
  }
  double need = 0.0;
  for (const auto& p : pts) need = std::max(need, (0.5 - p.k) / p.gain);
  out.k2 = need > 0.0 ? 1.1 * need : 0.0;
  out.min_K = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) out.min_K = std::min(out.min_K, p.k + out.k2 * p.gain);
  return out;
}

double bracket_m(double a11, double a11_x, double b1, const PhiValues& phi, double k2) {
  return a11_x * phi.dx - k2 * a11 * phi.dx * phi.dx + a11 * phi.dxx - b1 * phi.dx;
}

K1Selection select_k1(const ProblemSpec& spec, const AuxiliaryFunction& phi, double k2,
                      SampleGrid grid, double margin) {
  K1Selection out;
  out.margin = margin;
  out.rho = estimate_rho(spec, grid);
  if (!(out.rho > 0.0)) throw HypothesisError("a11 is not uniformly positive (rho <= 0)");
  double worst = -std::numeric_limits<double>::infinity();
  for_each_sample(spec.domain, grid, [&](double x, double t) {
    const double a11 = spec.a11(x, t);
    const double a11_x = spec.a11.dx(x, t);
    const double b1 = spec.b1(x, t);
    const PhiValues p = phi.at(x, t);
    const double m = bracket_m(a11, a11_x, b1, p, k2);
    const double big_b = b1 + 2.0 * a11 * k2 * p.dx;
    const double need = k2 * p.dt - k2 * m + spec.lipschitz_c + big_b * big_b / out.rho;
    if (!std::isfinite(need)) {
      std::ostringstream msg;
      msg << "non-finite coefficient sample at x=" << x << ", t=" << t;
      throw HypothesisError(msg.str());
    }
    worst = std::max(worst, need);
  });
  out.k1 = std::min(0.0, -(worst + margin));
  return out;
}

TransformedProblem::TransformedProblem(ProblemSpec spec, AuxiliaryFunction phi, double k1,
                                       double k2, double rho)
    : spec_(std::move(spec)), phi_(std::move(phi)), k1_(k1), k2_(k2), rho_(rho) {}

PointCoefficients TransformedProblem::at(double x, double t) const {
  PointCoefficients out;
  const double a11 = spec_.a11(x, t);
  const double a11_x = spec_.a11.dx(x, t);
  const double b1 = spec_.b1(x, t);
  const PhiValues p = phi_.at(x, t);
  out.a11 = a11;
  out.B1 = b1 + 2.0 * a11 * k2_ * p.dx;
  const double base = -k1_ - k2_ * p.dt + k2_ * bracket_m(a11, a11_x, b1, p, k2_);
  out.residual = base - spec_.lipschitz_c - out.B1 * out.B1 / rho_;
  out.clin = base;
  if (spec_.c.is_linear()) out.clin += spec_.c.coefficient()(x, t);
  out.exponent = k1_ * t + k2_ * p.value;
  out.G = std::exp(out.exponent) * spec_.g(x, t);
  return out;
}

double TransformedProblem::cnl(double x, double t, double u) const {
  if (spec_.c.is_linear()) return 0.0;
  const double e = exponent(x, t);
  return std::exp(e) * spec_.c(x, t, std::exp(-e) * u);
}

double TransformedProblem::F(double x, double t) const { return std::exp(k1_ * t) * spec_.f(x, t); }

double TransformedProblem::ubar(double x, double t) const {
  return std::exp(exponent(x, t)) * spec_.ybar(x, t);
}

double TransformedProblem::u0(double x) const {
  return std::exp(k2_ * phi_.value(x, 0.0)) * spec_.y0(x, 0.0);
}

double TransformedProblem::K(Side side, double x, double t, double abs_nu_x) const {
  return transformed_robin(spec_.k(x, t), k2_, phi_.normal_derivative(side, t), spec_.a11(x, t),
                           abs_nu_x);
}

TransformedProblem transform_problem(const ProblemSpec& spec, const AuxiliaryFunction& phi,
                                     double k1, double k2, double rho) {
  return TransformedProblem(spec, phi, k1, k2, rho);
}

std::vector<double> inverse_transform(std::span<const Point> nodes, std::span<const double> u,
                                      const AuxiliaryFunction& phi, double k1, double k2) {
  if (nodes.size() != u.size()) throw std::invalid_argument("field size does not match nodes");
  std::vector<double> y(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    y[i] = std::exp(-k1 * nodes[i].t - k2 * phi.value(nodes[i].x, nodes[i].t)) * u[i];
  return y;
}

std::vector<double> forward_transform(std::span<const Point> nodes, std::span<const double> y,
                                      const AuxiliaryFunction& phi, double k1, double k2) {
  if (nodes.size() != y.size()) throw std::invalid_argument("field size does not match nodes");
  std::vector<double> u(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    u[i] = std::exp(k1 * nodes[i].t + k2 * phi.value(nodes[i].x, nodes[i].t)) * y[i];
  return u;
}

LipschitzCheck check_lipschitz(const ProblemSpec& spec, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LipschitzCheck out;
  const double tol = spec.lipschitz_c * 1e-6 + 1e-6;
  constexpr double h = 1e-5;
  for (int i = 0; i < samples; ++i) {
    const double t = spec.domain.T * unit(rng);
    const double x = spec.domain.left(t) + spec.domain.width(t) * unit(rng);
    const double u = kLipschitzURange * (2.0 * unit(rng) - 1.0);
    double q = 0.0;
    if (spec.c.is_linear()) {
      q = std::abs(spec.c.coefficient()(x, t));
    } else {
      q = std::abs(spec.c(x, t, u + h) - spec.c(x, t, u - h)) / (2.0 * h);
    }
    if (!std::isfinite(q)) q = std::numeric_limits<double>::infinity();
    if (q > out.max_quotient) {
      out.max_quotient = q;
      out.worst = {x, t};
      out.worst_u = u;
    }
  }
  out.pass = out.max_quotient <= spec.lipschitz_c + tol;
  return out;
}

}  // namespace penaparab
