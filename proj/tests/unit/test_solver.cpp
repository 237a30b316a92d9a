#include <gtest/gtest.h>

#include <cmath>

#include "common/helpers.hpp"
#include "penaparab/mesh.hpp"
#include "penaparab/solver.hpp"

using namespace penaparab;
using helpers::ex;

namespace {

TEST(PenaltySchedule, DefaultsAndValidation) {
  EXPECT_EQ(PenaltySchedule().values(), (std::vector<double>{1, 10, 100, 1000, 10000}));
  EXPECT_EQ(PenaltySchedule::coupled_to_mesh(16).values(), std::vector<double>{256});
  EXPECT_THROW(PenaltySchedule(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(PenaltySchedule({10.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(PenaltySchedule({0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(PenaltySchedule({1.0, 1.0}), std::invalid_argument);
}

TEST(L2Norm, ExactForLinearFields) {
  const auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Robin);
  const auto mesh = build_mesh(spec.domain, spec.partition, 4, 4);
  std::vector<double> v(mesh.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mesh.nodes[i].x + 2 * mesh.nodes[i].t;
  // int (x + 2t)^2 over the unit square = 1/3 + 1 + 4/3.
  EXPECT_NEAR(l2_norm(mesh, v), std::sqrt(1.0 / 3 + 1.0 + 4.0 / 3), 1e-14);
}

TEST(Energies, LinearField) {
  const auto spec = helpers::unit_spec(BcKind::Dirichlet, BcKind::Robin);
  const auto mesh = build_mesh(spec.domain, spec.partition, 4, 4);
  std::vector<double> v(mesh.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 3 * mesh.nodes[i].x + 2 * mesh.nodes[i].t;
  const auto e = compute_energies(mesh, v, 4.0);
  EXPECT_NEAR(e.e_pen, 1.0, 1e-14);
  EXPECT_NEAR(e.e_grad, 9.0, 1e-13);
  EXPECT_NEAR(e.trace0, 3.0, 1e-14);  // int (3x)^2
  EXPECT_NEAR(e.traceT, 3.0 + 6.0 + 4.0, 1e-13);  // int (3x + 2)^2
}

TEST(SolveLinear, ZeroDataGivesZero) {
  const auto cfg = helpers::load("zero_problem");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 8, 8);
  const auto sol = solve_linear(tp, mesh, 100.0);
  for (double v : sol.u) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(sol.picard.iterations, 1);
}

TEST(SolveLinear, LinearProfileIsReproduced) {
  const auto cfg = helpers::load_fixture("linear_exact");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 8, 8);
  for (double m : {1.0, 1e4}) {
    const auto sol = solve_linear(tp, mesh, m);
    for (std::size_t i = 0; i < sol.u.size(); ++i)
      EXPECT_NEAR(sol.u[i], mesh.nodes[i].x, 1e-12) << m;
  }
}

TEST(SolveSemilinear, ZeroReactionMatchesLinear) {
  const auto cfg = helpers::load("static_heat");
  const auto linear = helpers::certified(cfg);
  auto spec = cfg.spec;
  spec.c = Reaction::semilinear([](double, double, double) { return 0.0; }, "0");
  const TransformedProblem semi(spec, linear.phi(), linear.k1(), linear.k2(), linear.rho());
  const auto mesh = build_mesh(spec.domain, spec.partition, 8, 8);
  const auto a = solve_linear(linear, mesh, 64.0);
  const auto b = solve_semilinear(semi, mesh, 64.0, 1e-10, 30);
  ASSERT_EQ(a.u.size(), b.u.size());
  for (std::size_t i = 0; i < a.u.size(); ++i) EXPECT_NEAR(a.u[i], b.u[i], 1e-13);
  EXPECT_TRUE(b.picard.converged);
}

TEST(SolveSemilinear, InfiniteToleranceStopsAfterOneIteration) {
  const auto cfg = helpers::load("semilinear_sin");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 8, 8);
  const auto sol = solve_semilinear(tp, mesh, 64.0, INFINITY, 30);
  EXPECT_EQ(sol.picard.iterations, 1);
  EXPECT_TRUE(sol.picard.converged);
}

TEST(SolveSemilinear, SineContractsQuickly) {
  const auto cfg = helpers::load("semilinear_sin");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 16, 16);
  const auto sol = solve_semilinear(tp, mesh, 256.0, 1e-10, 30);
  EXPECT_TRUE(sol.picard.converged);
  EXPECT_LE(sol.picard.iterations, 30);
  EXPECT_LE(sol.picard.ratio, 0.5);
  const auto& g = sol.picard.gaps;
  ASSERT_GE(g.size(), 3u);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) EXPECT_LT(g[i], g[i - 1]);
}

TEST(SolveSemilinear, TooFewIterationsIsANumericalError) {
  const auto cfg = helpers::load("semilinear_sin");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 8, 8);
  EXPECT_THROW(solve_semilinear(tp, mesh, 64.0, 1e-14, 2), NumericalError);
}

TEST(RunSchedule, ZeroProblemHasZeroEnergies) {
  const auto cfg = helpers::load("zero_problem");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 8, 8);
  const auto rep = run_schedule(tp, mesh, PenaltySchedule());
  ASSERT_EQ(rep.steps.size(), 5u);
  EXPECT_FALSE(rep.failure);
  for (const auto& s : rep.steps) {
    EXPECT_EQ(s.energies.e_pen, 0.0);
    EXPECT_EQ(s.energies.e_grad, 0.0);
    EXPECT_EQ(s.energies.trace0, 0.0);
    EXPECT_EQ(s.energies.traceT, 0.0);
  }
  EXPECT_TRUE(std::isnan(rep.steps[0].cauchy_gap));
}

TEST(RunSchedule, CauchyGapsShrink) {
  const auto cfg = helpers::load("static_heat");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 16, 16);
  const auto rep = run_schedule(tp, mesh, PenaltySchedule());
  ASSERT_EQ(rep.steps.size(), 5u);
  for (std::size_t i = 2; i < rep.steps.size(); ++i)
    EXPECT_LT(rep.steps[i].cauchy_gap, rep.steps[i - 1].cauchy_gap);
  EXPECT_EQ(rep.y.size(), mesh.nodes.size());
  EXPECT_EQ(rep.y_richardson.size(), mesh.nodes.size());
}

TEST(RunSchedule, SingleStepHasNoExtrapolation) {
  const auto cfg = helpers::load("static_heat");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 4, 4);
  const auto rep = run_schedule(tp, mesh, PenaltySchedule({10.0}));
  EXPECT_EQ(rep.steps.size(), 1u);
  EXPECT_TRUE(rep.y_richardson.empty());
}

TEST(RunSchedule, FailureKeepsCompletedSteps) {
  const auto cfg = helpers::load("semilinear_sin");
  const auto tp = helpers::certified(cfg);
  const auto mesh = build_mesh(cfg.spec.domain, cfg.spec.partition, 8, 8);
  const auto rep = run_schedule(tp, mesh, PenaltySchedule({1.0, 10.0}), PicardOptions{1e-14, 2});
  ASSERT_TRUE(rep.failure.has_value());
  EXPECT_TRUE(rep.steps.empty());
}

}  // namespace
