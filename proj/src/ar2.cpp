#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "offo/solvers.hpp"

namespace offo {

void Ar2Config::validate() const {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("AR2: sigma0 must be positive");
  if (!(0.0 < eta1 && eta1 <= eta2 && eta2 < 1.0)) {
    throw std::invalid_argument("AR2: need 0 < eta1 <= eta2 < 1");
  }
  if (!(gamma1 > 1.0) || !(gamma2 > 0.0 && gamma2 < 1.0)) {
    throw std::invalid_argument("AR2: need gamma1 > 1 and gamma2 in (0,1)");
  }
  if (!(gamma3 >= sigma0) || !(sigma_min > 0.0)) {
    throw std::invalid_argument("AR2: need gamma3 >= sigma0 and sigma_min > 0");
  }
  if (!(eps1 > 0.0) || max_iter <= 0) throw std::invalid_argument("AR2: bad eps1/max_iter");
}

std::uint64_t Ar2Config::hash() const {
  std::ostringstream os;
  os << "ar2|" << format_double(sigma0) << '|' << format_double(eta1) << '|'
     << format_double(eta2) << '|' << format_double(gamma1) << '|' << format_double(gamma2)
     << '|' << format_double(gamma3) << '|' << format_double(sigma_min) << '|'
     << format_double(theta1) << '|' << format_double(eps1) << '|' << max_iter;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

bool bundle_finite(const DerivativeBundle& b) {
  return b.derivatives_finite() && b.fvalue && std::isfinite(*b.fvalue);
}

}  // namespace

// The inner solve is the exact global minimizer of the cubic model, which satisfies any
// relative inner stopping rule, so config.theta1 is carried for bookkeeping only.
RunOutcome run_ar2(const ProblemOracle& problem, const Ar2Config& config,
                   const IterationObserver& observer) {
  config.validate();
  RunOutcome out;
  out.trace.problem = problem.name;
  out.trace.algorithm = "ar2";
  out.trace.config_hash = config.hash();

  Vector x = problem.start;
  DerivativeBundle bundle = problem.evaluate(x);
  ++out.derivative_evaluations;
  ++out.function_evaluations;
  if (!bundle.hessian) throw std::invalid_argument("AR2 requires Hessians");
  if (!bundle.fvalue) throw std::invalid_argument("AR2 requires function values");
  double sigma = config.sigma0;

  int k = 0;
  for (;; ++k) {
    TraceRow row;
    row.k = k;
    row.grad_norm = bundle.gradient.norm();
    row.fvalue = bundle.fvalue;
    if (!bundle_finite(bundle)) {
      out.trace.rows.push_back(row);
      out.status = RunStatus::OracleOverflow;
      break;
    }
    row.lambda_min = min_eigenvalue(*bundle.hessian);
    if (row.grad_norm <= config.eps1 || k >= config.max_iter) {
      out.trace.rows.push_back(row);
      out.status = row.grad_norm <= config.eps1 ? RunStatus::FirstOrderPoint
                                                : RunStatus::MaxIterations;
      if (observer) observer({k, x, bundle, sigma, 0.0, 0.0, std::nullopt, nullptr});
      break;
    }

    RegularizedModel model(bundle, sigma, 2);
    StepResult step;
    try {
      step = solve_model(model);
    } catch (const std::exception&) {
      out.trace.rows.push_back(row);
      out.status = RunStatus::OracleOverflow;
      break;
    }
    const double predicted = taylor_decrease(model, step.step);

    const Vector trial_x = x + step.step;
    DerivativeBundle trial = problem.evaluate(trial_x);
    ++out.function_evaluations;
    double rho = -std::numeric_limits<double>::infinity();
    if (trial.fvalue && std::isfinite(*trial.fvalue)) {
      rho = (*bundle.fvalue - *trial.fvalue) / predicted;
    }
    const bool accepted = rho >= config.eta1;

    row.sigma = sigma;
    row.step_norm = step.step.norm();
    row.model_reduction = step.model_reduction;
    row.rho = rho;
    row.accepted = accepted;
    out.trace.rows.push_back(row);
    if (observer) observer({k, x, bundle, sigma, 0.0, 0.0, std::nullopt, &step});

    if (accepted) {
      x = trial_x;
      bundle = std::move(trial);
      ++out.derivative_evaluations;
    } else {
      ++out.rejected_steps;
    }
    if (rho >= config.eta2) {
      sigma = std::max(config.sigma_min, config.gamma2 * sigma);
    } else if (!accepted) {
      sigma = std::min(config.gamma1 * sigma, config.gamma3);
    }
  }

  out.iterations = k;
  out.final_x = x;
  out.final_grad_norm = out.trace.rows.back().grad_norm;
  out.final_lambda_min = out.trace.rows.back().lambda_min;
  return out;
}

}  // namespace offo
