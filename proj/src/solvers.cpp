#include "offo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace offo {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void OffoConfig::validate() const {
  require(degree == 1 || degree == 2, "degree must be 1 or 2");
  require(theta1 > 1.0, "theta1 must exceed 1");
  require(theta2 > 1.0, "theta2 must exceed 1");
  require(vartheta > 0.0 && vartheta <= 1.0, "vartheta must lie in (0,1]");
  require(eps1 > 0.0 && eps1 <= 1.0, "eps1 must lie in (0,1]");
  require(!eps2 || (*eps2 > 0.0 && *eps2 <= 1.0), "eps2 must lie in (0,1]");
  require(!eps2 || degree == 2, "second-order termination requires degree 2");
  require(beta > 0.0 && beta <= 1.0, "beta must lie in (0,1]");
  require(varsigma > 0.0, "varsigma must be positive");
  require(max_iter > 0, "max_iter must be positive");
  require(!(strict_mode && smoothing), "strict mode excludes smoothing");
  require(!nu0 || *nu0 > 0.0, "nu0 must be positive");
}

std::uint64_t OffoConfig::hash() const {
  std::ostringstream os;
  os << "offo|" << degree << '|' << format_double(theta1) << '|' << format_double(theta2) << '|'
     << format_double(vartheta) << '|' << format_double(eps1) << '|'
     << (eps2 ? format_double(*eps2) : "-") << '|' << format_double(beta) << '|'
     << format_double(varsigma) << '|' << max_iter << '|' << smoothing << '|' << strict_mode
     << '|' << (nu0 ? format_double(*nu0) : "-");
  return fnv1a(os.str());
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::FirstOrderPoint: return "FirstOrderPoint";
    case RunStatus::SecondOrderPoint: return "SecondOrderPoint";
    case RunStatus::MaxIterations: return "MaxIterations";
    case RunStatus::OracleOverflow: return "OracleOverflow";
  }
  return "unknown";
}

double mu1_update(double grad_norm, double prev_step_norm, double sigma_prev, double theta1,
                  int p) {
  if (!(prev_step_norm > 0.0)) throw std::invalid_argument("mu1_update: zero previous step");
  return factorial(p) * grad_norm / std::pow(prev_step_norm, p) - theta1 * sigma_prev;
}

double mu2_update(double min_eig, double prev_step_norm, double sigma_prev, double theta2, int p) {
  if (!(prev_step_norm > 0.0)) throw std::invalid_argument("mu2_update: zero previous step");
  return factorial(p - 1) * std::max(0.0, -min_eig) / std::pow(prev_step_norm, p - 1) -
         theta2 * sigma_prev;
}

double sigma_select(const SolverState& state, const OffoConfig& config) {
  if (state.k == 0) return state.nu;
  double mu = state.mu1;
  if (state.mu2) mu = std::max(mu, *state.mu2);
  const double lo = config.vartheta * state.nu;
  const double hi = std::max(state.nu, mu);
  const double candidate = config.strict_mode ? std::max(lo, mu) : std::max(lo, state.xi * mu);
  return std::clamp(candidate, lo, hi);
}

double nu_update(double nu, double step_norm, int p) {
  return nu + nu * std::pow(step_norm, p + 1);
}

XiTarget xi_target_update(const SolverState& state, double grad_norm_now, double grad_norm_prev,
                          const OffoConfig& config) {
  if (grad_norm_now <= state.target) {
    return {std::max(config.vartheta, 0.5 * state.xi), 0.9 * std::pow(grad_norm_now, config.beta)};
  }
  if (grad_norm_now > std::max(state.target, grad_norm_prev) && state.xi < 1.0) {
    return {0.5 * (1.0 + state.xi), state.target};
  }
  return {state.xi, state.target};
}

SmoothedValues smoothed_updates(const SolverState& state, double grad_norm,
                                double prev_step_norm, const OffoConfig& config) {
  if (!(prev_step_norm > 0.0)) throw std::invalid_argument("smoothed_updates: zero previous step");
  const int p = config.degree;
  const double ratio = factorial(p) * grad_norm / std::pow(prev_step_norm, p);
  SmoothedValues v;
  v.delta = 0.9 * state.delta + 0.1 * ratio;
  v.tau = 0.9 * state.tau + 0.1 * grad_norm;
  v.mu1 = v.delta - config.theta1 * state.sigma;
  return v;
}

namespace {

RunOutcome run_offo(const ProblemOracle& problem, const OffoConfig& config, bool second_order,
                    const IterationObserver& observer, const char* algorithm) {
  config.validate();
  if (second_order != config.second_order()) {
    throw std::invalid_argument(second_order ? "second-order driver requires eps2"
                                             : "first-order driver must not be given eps2");
  }
  if (problem.start.size() != problem.dimension || problem.dimension < 1) {
    throw std::invalid_argument("problem start point does not match its dimension");
  }

  const int p = config.degree;
  RunOutcome out;
  out.trace.problem = problem.name;
  out.trace.algorithm = algorithm;
  out.trace.config_hash = config.hash();

  SolverState st;
  st.x = problem.start;

  for (int k = 0;; ++k) {
    st.k = k;
    st.bundle = problem.evaluate(st.x);
    ++out.derivative_evaluations;

    TraceRow row;
    row.k = k;
    row.fvalue = st.bundle.fvalue;

    const bool shape_ok = st.bundle.gradient.size() == problem.dimension &&
                          (p == 1 || (st.bundle.hessian && st.bundle.hessian->rows() ==
                                                               problem.dimension));
    if (!shape_ok) throw std::runtime_error("oracle returned derivatives of the wrong shape");
    if (!st.bundle.derivatives_finite()) {
      row.grad_norm = st.bundle.gradient.norm();
      out.trace.rows.push_back(row);
      out.status = RunStatus::OracleOverflow;
      break;
    }

    const double gnorm = st.bundle.gradient.norm();
    row.grad_norm = gnorm;
    std::optional<double> lmin;
    if (p == 2) lmin = min_eigenvalue(*st.bundle.hessian);
    row.lambda_min = lmin;

    const bool first_ok = gnorm <= config.eps1;
    const bool done = second_order ? (first_ok && *lmin >= -*config.eps2) : first_ok;

    // Parameter updates for iteration k; skipped on the terminal iterate.
    if (k == 0) {
      st.nu = config.nu0 ? *config.nu0 : std::max(config.varsigma, 6.0 * gnorm);
      st.sigma = st.nu;
      st.mu1 = st.nu;
      if (second_order) st.mu2 = st.nu;
      st.xi = 1.0;
      st.target = 0.9 * std::pow(gnorm, config.beta);
      st.delta = std::max(config.varsigma, gnorm);
      st.tau = gnorm;
      st.prev_grad_measure = gnorm;
    } else if (!done && k < config.max_iter) {
      const double sn = st.prev_step->norm();
      if (config.smoothing) {
        const SmoothedValues sv = smoothed_updates(st, gnorm, sn, config);
        st.delta = sv.delta;
        st.tau = sv.tau;
        st.mu1 = sv.mu1;
      } else {
        st.mu1 = mu1_update(gnorm, sn, st.sigma, config.theta1, p);
      }
      if (second_order) st.mu2 = mu2_update(*lmin, sn, st.sigma, config.theta2, p);
      if (!config.strict_mode) {
        const double measure = config.smoothing ? st.tau : gnorm;
        const XiTarget xt = xi_target_update(st, measure, st.prev_grad_measure, config);
        st.xi = xt.xi;
        st.target = xt.target;
        st.prev_grad_measure = measure;
      }
      st.sigma = sigma_select(st, config);
    }

    row.nu = st.nu;
    if (!config.strict_mode) {
      row.xi = st.xi;
      row.target = st.target;
    }
    if (config.smoothing) {
      row.delta = st.delta;
      row.tau = st.tau;
    }

    if (done || k >= config.max_iter) {
      out.trace.rows.push_back(row);
      if (done) {
        out.status = second_order ? RunStatus::SecondOrderPoint : RunStatus::FirstOrderPoint;
      } else {
        out.status = RunStatus::MaxIterations;
      }
      if (observer) observer({k, st.x, st.bundle, st.sigma, st.nu, st.mu1, st.mu2, nullptr});
      break;
    }

    RegularizedModel model(st.bundle, st.sigma, p);
    StepResult step;
    try {
      step = solve_model(model);
    } catch (const std::exception&) {
      // Finite but extreme derivatives can defeat the subproblem arithmetic.
      out.trace.rows.push_back(row);
      out.status = RunStatus::OracleOverflow;
      break;
    }
    if (!step.step.allFinite()) {
      out.trace.rows.push_back(row);
      out.status = RunStatus::OracleOverflow;
      break;
    }
    const bool certified =
        certify(step, model, config.theta1,
                second_order ? std::optional<double>(config.theta2) : std::nullopt);
    if (!certified) ++out.certificate_failures;

    row.sigma = st.sigma;
    row.mu1 = st.mu1;
    row.mu2 = st.mu2;
    row.step_norm = step.step.norm();
    row.model_reduction = step.model_reduction;
    row.certified = certified;
    out.trace.rows.push_back(row);

    if (observer) observer({k, st.x, st.bundle, st.sigma, st.nu, st.mu1, st.mu2, &step});

    st.x += step.step;
    st.nu = nu_update(st.nu, step.step.norm(), p);
    st.prev_step = std::move(step.step);
  }

  out.iterations = st.k;
  out.final_x = st.x;
  out.final_grad_norm = out.trace.rows.back().grad_norm;
  out.final_lambda_min = out.trace.rows.back().lambda_min;
  return out;
}

}  // namespace

RunOutcome run_offar(const ProblemOracle& problem, const OffoConfig& config,
                     const IterationObserver& observer) {
  return run_offo(problem, config, false, observer, config.degree == 1 ? "offar1" : "offar2");
}

RunOutcome run_moffar(const ProblemOracle& problem, const OffoConfig& config,
                      const IterationObserver& observer) {
  if (config.degree != 2) throw std::invalid_argument("run_moffar: degree must be 2");
  return run_offo(problem, config, true, observer, "moffar2");
}

}  // namespace offo
