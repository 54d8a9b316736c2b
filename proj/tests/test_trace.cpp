#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "offo/batch.hpp"
#include "offo/trace.hpp"

using namespace offo;

TEST(FormatDouble, RoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, u(rng)) * (i % 2 ? -1 : 1);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  for (double v : {0.0, -0.0, 0.1, 1e-310, std::numeric_limits<double>::max(),
                   std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_TRUE(std::isnan(parse_double(format_double(std::nan("")))));
}

TEST(TraceCsv, RoundTripHandBuilt) {
  RunTrace t;
  t.problem = "p";
  t.algorithm = "offar2a";
  t.config_hash = 0xdeadbeefcafef00dULL;
  t.seed = 42;
  TraceRow a;
  a.k = 0;
  a.grad_norm = 1.0 / 3.0;
  a.sigma = 2.5e-17;
  a.nu = 7.0;
  a.mu1 = -1.25;
  a.certified = true;
  a.accepted = false;
  a.rho = -std::numeric_limits<double>::infinity();
  TraceRow b;
  b.k = 1;
  b.grad_norm = 1e-7;
  b.lambda_min = -0.0;
  t.rows = {a, b};
  EXPECT_EQ(trace_from_csv(trace_to_csv(t)), t);
}

TEST(TraceCsv, RoundTripSolverRuns) {
  for (Algorithm alg : {Algorithm::Offar2a, Algorithm::Offar2b, Algorithm::Moffar2, Algorithm::Ar2}) {
    RunSpec spec;
    spec.problem = "beale";
    spec.algorithm = alg;
    spec.noise = 0.05;
    spec.eps1 = 1e-3;
    spec.max_iter = 200;
    RunOutcome out = execute(spec, find_problem("beale"));
    out.trace.seed = spec.seed;
    const RunTrace back = trace_from_csv(trace_to_csv(out.trace));
    EXPECT_EQ(back, out.trace) << to_string(alg);
  }
}

TEST(TraceCsv, MalformedInputThrows) {
  EXPECT_THROW(trace_from_csv("# problem=x\nnot,a,header\n1,2,3\n"), std::runtime_error);
  RunTrace t;
  t.rows.push_back(TraceRow{});
  std::string csv = trace_to_csv(t);
  csv += "1,2\n";
  EXPECT_THROW(trace_from_csv(csv), std::runtime_error);
}
