#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "offo/oracle.hpp"

namespace offo {

/// The twelve desk-scale test problems at their standard dimensions and start points.
std::vector<ProblemOracle> make_suite();

/// Looks a suite problem up by name; throws std::out_of_range when unknown.
ProblemOracle find_problem(const std::string& name);

std::vector<std::string> suite_names();

/// 1/2 x' diag(d) x, with exact Lipschitz metadata (L_2 = 0) and kappa_high = min(0, min d).
ProblemOracle make_diagonal_quadratic(const Vector& diag, const Vector& start);

/// 1/2 ||x||^2 + a sum_i sin(x_i): Hessian Lipschitz with L_2 = a, Hessian bounded below by
/// 1 - a.
ProblemOracle make_sine_bowl(Eigen::Index n, double amplitude, const Vector& start);

/// Relative Gaussian perturbation of an oracle's outputs.
struct NoiseSpec {
  double level = 0.0;
  std::uint64_t seed = 0;
  bool function = true;
  bool gradient = true;
  bool hessian = true;
};

/// Wraps `oracle` so each targeted scalar q becomes q (1 + level z), z ~ N(0,1), with a fresh
/// draw per entry per evaluation. Draws depend only on (seed, evaluation counter, entry), so
/// the wrapper is reproducible; it owns its counter and must not be shared between runs.
/// The Hessian is perturbed on its upper triangle and mirrored.
ProblemOracle add_noise(const ProblemOracle& oracle, const NoiseSpec& spec);

struct DerivativeViolation {
  std::size_t point = 0;
  enum class Kind { Gradient, Hessian } kind = Kind::Gradient;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  double analytic = 0.0;
  double finite_difference = 0.0;
  double relative_error = 0.0;
};

struct DerivativeReport {
  bool passed = true;
  double max_gradient_error = 0.0;
  double max_hessian_error = 0.0;
  std::vector<DerivativeViolation> violations;
};

/// Central differences with step 1e-6 max(1, ||x||): f against g (relative error <= 1e-5) and
/// g against H (<= 1e-4). Relative errors are taken against max(1, |analytic entry|).
DerivativeReport validate_derivatives(const ProblemOracle& oracle,
                                      const std::vector<Vector>& points);

/// `count` points drawn uniformly from the oracle's safe box.
std::vector<Vector> sample_box(const ProblemOracle& oracle, int count, std::uint64_t seed);

}  // namespace offo
