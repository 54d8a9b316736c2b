#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "offo/oracle.hpp"
#include "offo/subsolver.hpp"
#include "offo/trace.hpp"

namespace offo {

/// Parameters of the function-free drivers.
struct OffoConfig {
  int degree = 2;
  double theta1 = 2.0;
  /// Curvature certificate factor; used by the second-order driver only.
  double theta2 = 2.0;
  double vartheta = 0.001;
  double eps1 = 1e-6;
  std::optional<double> eps2;
  double beta = 1.0;
  double varsigma = 1e-6;
  int max_iter = 50000;
  /// Smoothed mu_1 and gradient-norm estimates, for noisy derivatives.
  bool smoothing = false;
  /// Plain interval rule for sigma: no xi/target adaptation, no smoothing.
  bool strict_mode = false;
  /// Initial regularization; max(varsigma, 6 ||g_0||) when absent.
  std::optional<double> nu0;

  bool second_order() const { return eps2.has_value(); }
  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  std::uint64_t hash() const;
};

enum class RunStatus { FirstOrderPoint, SecondOrderPoint, MaxIterations, OracleOverflow };

std::string to_string(RunStatus status);
inline bool succeeded(RunStatus s) {
  return s == RunStatus::FirstOrderPoint || s == RunStatus::SecondOrderPoint;
}

/// Scalars carried between iterations of the function-free drivers.
struct SolverState {
  int k = 0;
  Vector x;
  DerivativeBundle bundle;
  double nu = 1.0;
  double sigma = 1.0;
  double mu1 = 0.0;
  std::optional<double> mu2;
  double xi = 1.0;
  double target = 0.0;
  double delta = 0.0;
  double tau = 0.0;
  /// Gradient measure (||g|| or tau) of the previous iterate, for the xi rule.
  double prev_grad_measure = 0.0;
  std::optional<Vector> prev_step;
};

struct RunOutcome {
  RunStatus status = RunStatus::MaxIterations;
  Vector final_x;
  double final_grad_norm = 0.0;
  std::optional<double> final_lambda_min;
  int iterations = 0;
  int derivative_evaluations = 0;
  int function_evaluations = 0;
  int rejected_steps = 0;
  int certificate_failures = 0;
  RunTrace trace;
};

/// What an observer sees at iteration k. `step` is null on the terminal iterate.
struct IterationView {
  int k;
  const Vector& x;
  const DerivativeBundle& bundle;
  double sigma;
  double nu;
  double mu1;
  std::optional<double> mu2;
  const StepResult* step;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// p! ||g_k|| / ||s_{k-1}||^p - theta1 sigma_{k-1}
double mu1_update(double grad_norm, double prev_step_norm, double sigma_prev, double theta1,
                  int p);

/// (p-1)! max(0, -lambda_min) / ||s_{k-1}||^{p-1} - theta2 sigma_{k-1}
double mu2_update(double min_eig, double prev_step_norm, double sigma_prev, double theta2, int p);

/// sigma_k in [vartheta nu_k, max(nu_k, mu1[, mu2])]. Uses state.nu, mu1, mu2, xi and k.
double sigma_select(const SolverState& state, const OffoConfig& config);

/// nu + nu ||s||^{p+1}
double nu_update(double nu, double step_norm, int p);

struct XiTarget {
  double xi;
  double target;
};

/// Adapts the factor xi and the gradient-norm target from state.xi and state.target.
XiTarget xi_target_update(const SolverState& state, double grad_norm_now, double grad_norm_prev,
                          const OffoConfig& config);

struct SmoothedValues {
  double delta;
  double tau;
  double mu1;
};

/// Exponentially smoothed mu_1 estimate and gradient norm; reads state.delta, state.tau and
/// state.sigma (= sigma_{k-1}).
SmoothedValues smoothed_updates(const SolverState& state, double grad_norm,
                                double prev_step_norm, const OffoConfig& config);

/// Function-free adaptive regularization of degree 1 or 2, first-order termination.
RunOutcome run_offar(const ProblemOracle& problem, const OffoConfig& config,
                     const IterationObserver& observer = {});

/// Second-order variant: terminates only when ||g|| <= eps1 and lambda_min >= -eps2.
RunOutcome run_moffar(const ProblemOracle& problem, const OffoConfig& config,
                      const IterationObserver& observer = {});

/// Standard adaptive cubic regularization with a function-value ratio test.
struct Ar2Config {
  double sigma0 = 1.0;
  double eta1 = 1e-4;
  double eta2 = 0.95;
  double gamma1 = 2.0;
  double gamma2 = 0.5;
  double gamma3 = 1e20;
  double sigma_min = 1e-4;
  double theta1 = 0.1;
  double eps1 = 1e-6;
  int max_iter = 50000;

  void validate() const;
  std::uint64_t hash() const;
};

RunOutcome run_ar2(const ProblemOracle& problem, const Ar2Config& config,
                   const IterationObserver& observer = {});

}  // namespace offo
