#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "invariant_monitor.hpp"
#include "offo/problems.hpp"
#include "offo/solvers.hpp"
#include "offo/theory_bounds.hpp"

using namespace offo;
using offo::testing::double_well;
using offo::testing::half_norm_squared;
using offo::testing::InvariantMonitor;
using offo::testing::make_problem;
using offo::testing::vec;

namespace {

OffoConfig strict_config(int degree, double nu0) {
  OffoConfig c;
  c.degree = degree;
  c.strict_mode = true;
  c.nu0 = nu0;
  return c;
}

void expect_clean(const InvariantMonitor& m) {
  const auto v = m.violations();
  EXPECT_TRUE(v.empty()) << v.size() << " violations, first: " << (v.empty() ? "" : v.front());
}

}  // namespace

TEST(Mu1Update, Examples) {
  EXPECT_DOUBLE_EQ(mu1_update(2.0, 1.0, 1.0, 1.0, 2), 3.0);
  EXPECT_DOUBLE_EQ(mu1_update(0.0, 0.7, 3.0, 2.0, 1), -6.0);
  EXPECT_DOUBLE_EQ(mu1_update(1.0, 2.0, 0.5, 1.0, 2), 0.0);
  EXPECT_THROW(mu1_update(1.0, 0.0, 1.0, 1.0, 2), std::invalid_argument);
}

TEST(Mu2Update, Examples) {
  EXPECT_DOUBLE_EQ(mu2_update(1.0, 0.3, 2.0, 2.0, 2), -4.0);
  EXPECT_DOUBLE_EQ(mu2_update(-3.0, 1.0, 1.0, 1.0, 2), 2.0);
  EXPECT_DOUBLE_EQ(mu2_update(-1.0, 2.0, 0.25, 2.0, 2), 0.0);
  EXPECT_THROW(mu2_update(-1.0, 0.0, 1.0, 1.0, 2), std::invalid_argument);
}

TEST(SigmaSelect, Examples) {
  OffoConfig c;
  SolverState st;
  st.k = 3;
  st.nu = 10.0;
  st.xi = 1.0;
  st.mu1 = 4.0;
  EXPECT_DOUBLE_EQ(sigma_select(st, c), 4.0);
  st.mu1 = -5.0;
  EXPECT_DOUBLE_EQ(sigma_select(st, c), 0.01);
  st.k = 0;
  EXPECT_DOUBLE_EQ(sigma_select(st, c), 10.0);
}

TEST(SigmaSelect, PracticalAndStrictStayInInterval) {
  OffoConfig practical;
  OffoConfig strict;
  strict.strict_mode = true;
  SolverState st;
  st.k = 5;
  st.nu = 2.0;
  st.xi = 0.25;
  for (double mu1 : {-10.0, 0.001, 0.5, 3.0, 40.0}) {
    for (std::optional<double> mu2 : {std::optional<double>{}, std::optional<double>{7.0}}) {
      st.mu1 = mu1;
      st.mu2 = mu2;
      const double hi = std::max({st.nu, mu1, mu2.value_or(-INFINITY)});
      for (const OffoConfig& c : {practical, strict}) {
        const double s = sigma_select(st, c);
        EXPECT_GE(s, c.vartheta * st.nu);
        EXPECT_LE(s, hi);
      }
      const double mu = std::max(mu1, mu2.value_or(-INFINITY));
      EXPECT_DOUBLE_EQ(sigma_select(st, strict), std::max(0.002, mu));
      EXPECT_DOUBLE_EQ(sigma_select(st, practical), std::max(0.002, 0.25 * mu));
    }
  }
}

TEST(NuUpdate, Examples) {
  EXPECT_DOUBLE_EQ(nu_update(1.0, 1.0, 2), 2.0);
  EXPECT_DOUBLE_EQ(nu_update(1.0, 0.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(nu_update(2.0, 0.5, 1), 2.5);
}

TEST(XiTargetUpdate, Examples) {
  OffoConfig c;
  SolverState st;
  st.k = 1;
  st.target = 1.0;
  st.xi = 1.0;
  XiTarget r = xi_target_update(st, 0.5, 2.0, c);
  EXPECT_DOUBLE_EQ(r.xi, 0.5);
  EXPECT_DOUBLE_EQ(r.target, 0.45);

  st.xi = 0.5;
  r = xi_target_update(st, 2.0, 1.5, c);
  EXPECT_DOUBLE_EQ(r.xi, 0.75);
  EXPECT_DOUBLE_EQ(r.target, 1.0);

  r = xi_target_update(st, 1.2, 1.3, c);
  EXPECT_DOUBLE_EQ(r.xi, 0.5);
  EXPECT_DOUBLE_EQ(r.target, 1.0);

  st.xi = 0.0015;
  r = xi_target_update(st, 0.1, 1.0, c);
  EXPECT_DOUBLE_EQ(r.xi, c.vartheta);

  c.beta = 2.0 / 3.0;
  st.xi = 1.0;
  r = xi_target_update(st, 0.125, 1.0, c);
  EXPECT_NEAR(r.target, 0.9 * 0.25, 1e-15);
}

TEST(SmoothedUpdates, Examples) {
  OffoConfig c;
  SolverState st;
  st.delta = 1.0;
  st.tau = 2.0;
  st.sigma = 0.5;
  SmoothedValues v = smoothed_updates(st, 1.0, std::sqrt(2.0), c);
  EXPECT_NEAR(v.delta, 1.0, 1e-15);
  EXPECT_NEAR(v.mu1, 1.0 - 2.0 * 0.5, 1e-15);
  v = smoothed_updates(st, 0.0, 1.0, c);
  EXPECT_DOUBLE_EQ(v.tau, 1.8);
}

TEST(RunOffar, SmoothingInitialization) {
  OffoConfig c;
  c.smoothing = true;
  c.max_iter = 1;
  const auto out = run_offar(make_problem("lin", vec({3, 4}), [](const Vector& x) {
                               return DerivativeBundle::make(x, Matrix::Identity(2, 2));
                             }),
                             c);
  ASSERT_FALSE(out.trace.rows.empty());
  EXPECT_DOUBLE_EQ(*out.trace.rows[0].delta, 5.0);
  EXPECT_DOUBLE_EQ(*out.trace.rows[0].tau, 5.0);
  EXPECT_DOUBLE_EQ(*out.trace.rows[0].sigma, 30.0);  // sigma_0 = nu_0 = 6 ||g_0||
}

TEST(RunOffar, QuadraticFirstOrderStrict) {
  const OffoConfig c = strict_config(1, 1.0);
  InvariantMonitor mon(c, 1.0);
  const RunOutcome out = run_offar(half_norm_squared(vec({1, 1})), c, mon.observer());
  EXPECT_EQ(out.status, RunStatus::FirstOrderPoint);
  EXPECT_LE(out.final_grad_norm, 1e-6);
  EXPECT_EQ(out.certificate_failures, 0);
  expect_clean(mon);
}

TEST(RunOffar, DiagonalQuadraticSecondDegreeStrict) {
  const Vector d = vec({1, 10});
  const ProblemOracle prob = make_diagonal_quadratic(d, vec({1, 1}));
  const OffoConfig c = strict_config(2, 1.0);
  InvariantMonitor mon(c, 0.0);
  const RunOutcome out = run_offar(prob, c, mon.observer());
  EXPECT_EQ(out.status, RunStatus::FirstOrderPoint);
  EXPECT_LE(out.iterations, 50);
  expect_clean(mon);

  // Step bound with L_2 = 0: ||s_k||^2 >= 2 ||g_{k+1}|| / (theta1 sigma_k).
  const auto& rows = out.trace.rows;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    EXPECT_GE(*rows[k].step_norm * *rows[k].step_norm * (1 + 1e-12),
              2.0 * rows[k + 1].grad_norm / (c.theta1 * *rows[k].sigma));
  }
}

TEST(RunOffar, RosenbrockPractical) {
  OffoConfig c;
  c.eps1 = 1e-6;
  const RunOutcome out = run_offar(find_problem("rosenbr"), c);
  EXPECT_EQ(out.status, RunStatus::FirstOrderPoint);
  EXPECT_EQ(out.certificate_failures, 0);
  EXPECT_LE(out.final_grad_norm, 1e-6);
}

TEST(RunOffar, TraceShape) {
  OffoConfig c;
  const RunOutcome out = run_offar(find_problem("beale"), c);
  ASSERT_EQ(out.trace.rows.size(), static_cast<std::size_t>(out.iterations) + 1);
  for (std::size_t k = 0; k < out.trace.rows.size(); ++k) {
    EXPECT_EQ(out.trace.rows[k].k, static_cast<int>(k));
  }
  EXPECT_FALSE(out.trace.rows.back().step_norm.has_value());
  EXPECT_EQ(out.trace.config_hash, c.hash());
}

TEST(RunOffar, Determinism) {
  OffoConfig c;
  const ProblemOracle noisy = add_noise(find_problem("woods"), {0.1, 17});
  const ProblemOracle noisy2 = add_noise(find_problem("woods"), {0.1, 17});
  c.smoothing = true;
  c.eps1 = 1e-3;
  c.max_iter = 2000;
  const RunOutcome a = run_offar(noisy, c);
  const RunOutcome b = run_offar(noisy2, c);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.final_x, b.final_x);
}

TEST(RunOffar, OverflowStatus) {
  OffoConfig c;
  const auto prob = make_problem("bad", vec({1}), [](const Vector& x) {
    Vector g = x;
    if (std::abs(x(0) - 1.0) > 1e-12) g(0) = INFINITY;
    return DerivativeBundle::make(g, Matrix::Identity(1, 1));
  });
  const RunOutcome out = run_offar(prob, c);
  EXPECT_EQ(out.status, RunStatus::OracleOverflow);
  EXPECT_EQ(out.iterations, 1);
}

TEST(RunOffar, RejectsBadConfig) {
  OffoConfig c;
  c.vartheta = 0.0;
  EXPECT_THROW(run_offar(half_norm_squared(vec({1})), c), std::invalid_argument);
  c = OffoConfig{};
  c.eps2 = 1e-3;
  EXPECT_THROW(run_offar(half_norm_squared(vec({1})), c), std::invalid_argument);
  c = OffoConfig{};
  EXPECT_THROW(run_moffar(half_norm_squared(vec({1})), c), std::invalid_argument);
}

TEST(RunMoffar, ConvexQuadratic) {
  OffoConfig c;
  c.eps1 = 1e-3;
  c.eps2 = 1e-3;
  const RunOutcome out = run_moffar(half_norm_squared(vec({1, 1})), c);
  EXPECT_EQ(out.status, RunStatus::SecondOrderPoint);
  EXPECT_GE(*out.final_lambda_min, -1e-3);
}

TEST(RunMoffar, QuarticWell) {
  const auto prob = make_problem("well", vec({0.1}), [](const Vector& x) {
    const double t = x(0);
    return DerivativeBundle::make(Vector::Constant(1, t * t * t - t),
                                  Matrix::Constant(1, 1, 3 * t * t - 1),
                                  0.25 * t * t * t * t - 0.5 * t * t);
  });
  OffoConfig c;
  c.eps1 = 1e-6;
  c.eps2 = 1e-6;
  const RunOutcome out = run_moffar(prob, c);
  EXPECT_EQ(out.status, RunStatus::SecondOrderPoint);
  EXPECT_NEAR(std::abs(out.final_x(0)), 1.0, 1e-5);
  EXPECT_NEAR(*out.final_lambda_min, 2.0, 1e-4);
  EXPECT_LE(out.final_grad_norm, 1e-6);
}

TEST(RunMoffar, NeverStopsAtSaddle) {
  const auto prob = make_problem("saddle", vec({1, 0}), [](const Vector& v) {
    Matrix H(2, 2);
    H << 2, 0, 0, -2;
    return DerivativeBundle::make(vec({2 * v(0), -2 * v(1)}), H, v(0) * v(0) - v(1) * v(1));
  });
  OffoConfig c;
  c.eps1 = 1e-4;
  c.eps2 = 1e-4;
  c.max_iter = 2000;
  const RunOutcome out = run_moffar(prob, c);
  EXPECT_NE(out.status, RunStatus::SecondOrderPoint);
  EXPECT_NE(out.status, RunStatus::FirstOrderPoint);
  for (const TraceRow& r : out.trace.rows) EXPECT_LT(*r.lambda_min, -1e-4);
}

TEST(RunMoffar, EscapesDoubleWellSaddle) {
  OffoConfig c;
  c.eps1 = 1e-4;
  c.eps2 = 1e-4;
  const RunOutcome out = run_moffar(double_well(vec({0, 1})), c);
  EXPECT_EQ(out.status, RunStatus::SecondOrderPoint);
  EXPECT_NEAR(std::abs(out.final_x(0)), 1.0, 1e-3);
}

TEST(RunMoffar, StrictInvariants) {
  OffoConfig c = strict_config(2, 1.0);
  c.eps2 = 1e-4;
  c.eps1 = 1e-4;
  InvariantMonitor mon(c, std::nullopt);
  const RunOutcome out = run_moffar(double_well(vec({0, 1})), c, mon.observer());
  EXPECT_EQ(out.status, RunStatus::SecondOrderPoint);
  expect_clean(mon);
}

TEST(RunMoffar, TerminatesAtStartWhenAlreadyOptimal) {
  OffoConfig c;
  c.eps2 = 1e-3;
  const RunOutcome out = run_moffar(half_norm_squared(vec({0, 0})), c);
  EXPECT_EQ(out.status, RunStatus::SecondOrderPoint);
  EXPECT_EQ(out.iterations, 0);
}

class StrictInvariantsOnLipschitzProblems : public ::testing::TestWithParam<int> {};

TEST_P(StrictInvariantsOnLipschitzProblems, SigmaBelowTheoryBound) {
  ProblemOracle prob;
  switch (GetParam()) {
    case 0: prob = find_problem("tridia"); break;
    case 1: prob = make_diagonal_quadratic(vec({0.5, 2, 7}), vec({1, -1, 2})); break;
    case 2: prob = make_sine_bowl(3, 0.5, vec({2, -2, 1})); break;
    default: prob = make_sine_bowl(2, 2.0, vec({1.5, 0.3})); break;
  }
  OffoConfig c;
  c.strict_mode = true;
  c.eps1 = 1e-6;
  c.max_iter = 5000;
  const DerivativeBundle b0 = prob.evaluate(prob.start);
  const double nu0 = std::max(c.varsigma, 6.0 * b0.gradient.norm());
  InvariantMonitor mon(c, prob.meta.lipschitz_for(2));
  const BoundReport rep = theory_bounds(prob.meta, c, nu0, b0.gradient.norm(), b0.fvalue);
  ASSERT_TRUE(rep.sigma_max.has_value());
  mon.set_sigma_max(*rep.sigma_max);
  const RunOutcome out = run_offar(prob, c, mon.observer());
  EXPECT_EQ(out.status, RunStatus::FirstOrderPoint) << prob.name;
  EXPECT_EQ(mon.iterations_seen(), static_cast<std::size_t>(out.iterations) + 1);
  expect_clean(mon);
  ASSERT_TRUE(rep.first_order_bound.has_value());
  EXPECT_LE(out.iterations, *rep.first_order_bound);
}

INSTANTIATE_TEST_SUITE_P(Problems, StrictInvariantsOnLipschitzProblems,
                         ::testing::Values(0, 1, 2, 3));

TEST(InvariantMonitor, DetectsViolations) {
  // A monitor given a too-small Lipschitz constant must report errors on a curved problem.
  OffoConfig c = strict_config(2, 1.0);
  InvariantMonitor mon(c, 1e-6);
  run_offar(make_sine_bowl(2, 2.0, vec({1.5, 0.3})), c, mon.observer());
  EXPECT_FALSE(mon.violations().empty());
}
