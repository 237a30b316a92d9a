#include <gtest/gtest.h>

#include <cmath>

#include "common/helpers.hpp"
#include "penaparab/mesh.hpp"
#include "penaparab/transform.hpp"

using namespace penaparab;
using helpers::ex;
using helpers::ex_t;

namespace {

TEST(Phi, UnitIntervalValues) {
  const auto phi = build_phi(helpers::unit_spec(BcKind::Dirichlet, BcKind::Robin).domain);
  EXPECT_DOUBLE_EQ(phi.value(0.5, 0.3), 0.25);
  EXPECT_DOUBLE_EQ(phi.value(0.0, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(phi.value(1.0, 0.3), 0.0);
  const auto p = phi.at(0.25, 0.0);
  EXPECT_NEAR(p.dx, 0.5, 1e-12);
  EXPECT_NEAR(p.dxx, -2.0, 1e-12);
  EXPECT_NEAR(p.dt, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(phi.normal_derivative(Side::Right, 0.2), -1.0);
  EXPECT_DOUBLE_EQ(phi.eta(), 1.0);
}

TEST(Phi, ExpandingDomainMatchesFiniteDifferences) {
  MovingDomain d;
  d.a = ex_t("0");
  d.b = ex_t("1 + t/2");
  const auto phi = build_phi(d);
  const double h = 1e-5;
  for (double t : {0.1, 0.5, 0.9})
    for (double s : {0.2, 0.5, 0.7}) {
      const double x = s * d.right(t);
      const auto p = phi.at(x, t);
      EXPECT_GT(p.value, 0.0);
      EXPECT_NEAR(p.dx, (phi.value(x + h, t) - phi.value(x - h, t)) / (2 * h), 1e-7);
      EXPECT_NEAR(p.dt, (phi.value(x, t + h) - phi.value(x, t - h)) / (2 * h), 1e-7);
    }
  // -d(phi)/dn = (b(0) - a(0))^2 / (b - a) on both curves.
  EXPECT_NEAR(-phi.normal_derivative(Side::Right, 1.0), 1.0 / 1.5, 1e-12);
  EXPECT_NEAR(phi.eta(), 1.0 / 1.5, 1e-9);
}

TEST(SelectK2, StaticHeatRobinZero) {
  const auto spec = helpers::load("static_heat").spec;
  const auto sel = select_k2(spec, build_phi(spec.domain));
  EXPECT_NEAR(sel.k2, 0.55, 1e-12);
  EXPECT_NEAR(sel.min_K, 0.55, 1e-12);
}

TEST(SelectK2, NegativeRobinWithLargerDiffusion) {
  auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Robin);
  spec.k = ex("-1");
  spec.a11 = ex("2");
  const auto sel = select_k2(spec, build_phi(spec.domain));
  // K = -1 + 2 k2 >= 1/2 gives 0.75, times 1.1.
  EXPECT_NEAR(sel.k2, 0.825, 1e-12);
  EXPECT_GE(sel.min_K, 0.5);
}

TEST(SelectK2, LargeRobinNeedsNoShift) {
  auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Robin);
  spec.k = ex("0.7");
  EXPECT_EQ(select_k2(spec, build_phi(spec.domain)).k2, 0.0);
}

TEST(SelectK2, NoRobinPartGivesZero) {
  const auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Dirichlet);
  const auto sel = select_k2(spec, build_phi(spec.domain));
  EXPECT_EQ(sel.k2, 0.0);
  EXPECT_TRUE(std::isinf(sel.min_K));
}

TEST(SelectK1, StaticHeat) {
  const auto spec = helpers::load("static_heat").spec;
  const auto phi = build_phi(spec.domain);
  // Requirement max over x of k2 (k2 (1-2x)^2 + 2) + (2 k2 (1-2x))^2 at x = 0, plus the margin.
  const double k2 = 0.55;
  const double expected = -(k2 * (k2 + 2.0) + 4 * k2 * k2 + 1.0);
  EXPECT_NEAR(expected, -3.6125, 1e-12);
  EXPECT_NEAR(select_k1(spec, phi, k2, SampleGrid{64, 64}).k1, expected, 1e-9);
}

TEST(SelectK1, TrivialProblemKeepsMargin) {
  const auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Dirichlet);
  const auto sel = select_k1(spec, build_phi(spec.domain), 0.0, SampleGrid{32, 32});
  EXPECT_DOUBLE_EQ(sel.k1, -1.0);
  EXPECT_DOUBLE_EQ(sel.rho, 1.0);
}

TEST(SelectK1, LipschitzConstantShiftsRequirement) {
  auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Dirichlet);
  const auto phi = build_phi(spec.domain);
  const double base = select_k1(spec, phi, 0.0, SampleGrid{32, 32}).k1;
  spec.lipschitz_c = 2.5;
  EXPECT_NEAR(select_k1(spec, phi, 0.0, SampleGrid{32, 32}).k1, base - 2.5, 1e-12);
}

TEST(SelectK1, ResidualIsNonNegativeOnGrid) {
  const auto spec = helpers::load("variable_coefficients").spec;
  const auto phi = build_phi(spec.domain);
  const double k2 = select_k2(spec, phi).k2;
  const SampleGrid grid{64, 64};
  const auto s1 = select_k1(spec, phi, k2, grid);
  const TransformedProblem tp(spec, phi, s1.k1, k2, s1.rho);
  double worst = INFINITY;
  for_each_sample(spec.domain, grid,
                  [&](double x, double t) { worst = std::min(worst, tp.coercivity_residual(x, t)); });
  EXPECT_GE(worst, 1.0 - 1e-9);
}

TEST(Transformed, DataExamples) {
  auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Robin);
  spec.g = ex("1");
  spec.f = ex("2");
  spec.y0 = ex("sin(pi*x)");
  spec.ybar = ex("x");
  const auto phi = build_phi(spec.domain);
  const TransformedProblem tp(spec, phi, -1.0, 0.55, 1.0);
  EXPECT_NEAR(tp.G(0.0, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(tp.G(0.5, 1.0), std::exp(-1.0 + 0.1375), 1e-15);
  EXPECT_NEAR(tp.u0(0.5), std::exp(0.1375), 1e-15);
  EXPECT_NEAR(tp.u0(0.5), 1.147402, 1e-6);
  EXPECT_NEAR(tp.F(1.0, 0.5), 2.0 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(tp.ubar(1.0, 0.5), std::exp(-0.5), 1e-15);
  // Static Robin side: K = k + k2 * a11.
  EXPECT_NEAR(tp.K(Side::Right, 1.0, 0.5, 1.0), 0.55, 1e-15);
}

TEST(Transformed, LinearReactionEntersMatrixNotResidual) {
  auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Dirichlet);
  spec.lipschitz_c = 3.0;
  const auto phi = build_phi(spec.domain);
  const TransformedProblem plain(spec, phi, -5.0, 0.0, 1.0);
  spec.c = Reaction::linear(Field(ex("3")));
  const TransformedProblem shifted(spec, phi, -5.0, 0.0, 1.0);
  const auto a = plain.at(0.3, 0.4);
  const auto b = shifted.at(0.3, 0.4);
  EXPECT_NEAR(b.clin - a.clin, 3.0, 1e-14);
  EXPECT_NEAR(a.residual, 5.0 - 3.0, 1e-14);
  EXPECT_EQ(a.residual, b.residual);
}

TEST(Transformed, SemilinearLaggedTerm) {
  auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Dirichlet);
  spec.c = Reaction::semilinear(expr::parse("sin(u)", expr::kReaction));
  const auto phi = build_phi(spec.domain);
  const TransformedProblem tp(spec, phi, -2.0, 0.5, 1.0);
  const double e = -2.0 * 0.6 + 0.5 * phi.value(0.3, 0.6);
  EXPECT_NEAR(tp.cnl(0.3, 0.6, 0.8), std::exp(e) * std::sin(std::exp(-e) * 0.8), 1e-14);
  EXPECT_TRUE(tp.nonlinear_term_depends_on_u());
}

TEST(Transformed, RoundTrip) {
  const auto cfg = helpers::load("expanding_domain");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 16, 16);
  std::vector<double> y(mesh.nodes.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = std::cos(3 * mesh.nodes[i].x) + mesh.nodes[i].t;
  const auto u = forward_transform(mesh.nodes, y, tp.phi(), tp.k1(), tp.k2());
  const auto back = inverse_transform(mesh.nodes, u, tp.phi(), tp.k1(), tp.k2());
  for (std::size_t i = 0; i < y.size(); ++i)
    EXPECT_NEAR(back[i], y[i], 1e-13 * (1 + std::abs(y[i])));
}

TEST(Lipschitz, DetectsUnderstatedConstant) {
  auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Dirichlet);
  spec.c = Reaction::semilinear(expr::parse("2*sin(u)", expr::kReaction));
  spec.lipschitz_c = 1.0;
  EXPECT_FALSE(check_lipschitz(spec).pass);
  spec.lipschitz_c = 2.0;
  const auto r = check_lipschitz(spec);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_quotient, 2.0);
  EXPECT_GT(r.max_quotient, 1.9);
}

TEST(Rho, MinimumOfDiffusion) {
  auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Dirichlet);
  spec.a11 = ex("1 + x*t");
  EXPECT_DOUBLE_EQ(estimate_rho(spec, SampleGrid{16, 16}), 1.0);
  spec.a11 = ex("2 - x");
  EXPECT_DOUBLE_EQ(estimate_rho(spec, SampleGrid{16, 16}), 1.0);
}

}  // namespace
