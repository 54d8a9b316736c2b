#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "offo/oracle.hpp"
#include "offo/solvers.hpp"

namespace offo {

/// Raised when a generated sequence breaks one of the inequalities it is built to satisfy.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Slowly converging 1-D data sequence on which a function-free method with vartheta = 1
/// takes exactly k_eps iterations. In first-order mode `value` holds g_k (and H_k = 0);
/// in second-order mode it holds H_k (and g_k = 0).
struct SlowSequence {
  int p = 1;
  bool second_order = false;
  double eps = 1.0;
  double sigma0 = 1.0;
  long long k_eps = 0;
  std::vector<double> omega;
  std::vector<double> value;
  std::vector<double> s;
  std::vector<double> sigma;
  std::vector<double> f;
  std::vector<double> x;
  double sigma_max_bound = 0.0;
  double f0 = 0.0;
  /// Interpolation constant for which the Hermite conditions were checked.
  double kappa_f = 0.0;
};

/// ceil(x), snapping values within a few ulps of an integer onto it first so that
/// eps^-q for exact powers (0.25^-1.5 = 8) does not round up to the next integer.
long long guarded_ceil(double x);

/// Builds the first-order sequence (any p >= 1, eps in (0,1], sigma0 > 0) and checks its
/// range and interpolability conditions; throws ConstructionError on a violation.
SlowSequence gen_first_order(int p, double eps, double sigma0);

/// Second-order counterpart (p >= 2, eps2 in (0,1]).
SlowSequence gen_second_order(int p, double eps2, double sigma0);

/// CSV with header k,omega,g_or_H,s,sigma,f.
std::string sequence_to_csv(const SlowSequence& seq);

/// 1-D oracle serving (f_k, g_k, H_k) at the points x_k of the sequence. Requests at any
/// other point throw std::out_of_range. Only p <= 2 sequences can drive the solvers.
ProblemOracle scripted_oracle(const SlowSequence& seq);

/// The sequence driven through the strict-mode solver (run_offar, or run_moffar for a
/// second-order sequence) on its scripted oracle, with vartheta = 1 and nu_0 = sigma_0.
struct ReplayResult {
  RunOutcome outcome;
  /// Terminated at exactly k_eps with the expected status.
  bool exact_count = false;
  double max_sigma_rel_dev = 0.0;
  double max_nu_rel_dev = 0.0;
  double max_step_rel_dev = 0.0;
};

/// Requires p <= 2.
ReplayResult replay_sequence(const SlowSequence& seq);

/// Replay of the two-dimensional instance on which sigma_k = max(sigma_{k-1}, mu_1k)
/// never grows and the iterates diverge with ||g_k|| = sqrt 2.
struct DivergenceRun {
  double H = 1.0;
  double theta1 = 1.0;
  int iterations = 0;
  /// x_0 .. x_iterations.
  std::vector<Vector> x;
  std::vector<double> sigma;
  /// mu_1k for k >= 1; empty at k = 0.
  std::vector<std::optional<double>> mu1;
  /// What nu_k would be under the full rule nu_{k+1} = nu_k (1 + ||s_k||^3), nu_0 = sigma_0.
  std::vector<double> nu;
  std::vector<double> grad_norm;
  double closed_form_sigma = 0.0;
  /// Largest deviation of the exact subproblem solution from the closed-form step.
  double max_solver_deviation = 0.0;
  double kappa_f = 0.0;
};

/// H >= 1, theta1 >= 1, iters >= 1. Throws ConstructionError when sigma ||s|| / 2 = 1 fails
/// by more than 1e-12 or when any checked inequality fails.
DivergenceRun run_divergence(double H, double theta1, int iters);

}  // namespace offo
