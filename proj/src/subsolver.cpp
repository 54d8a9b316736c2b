#include "offo/subsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace offo {

namespace {

constexpr double kHardCaseProjectionTol = 1e-12;
// Relative slack in the certificate inequalities, covering rounding in the equality cases.
constexpr double kCertifySlack = 1e-12;
constexpr int kMaxSecularIterations = 200;

// Secular-equation data in the eigenbasis of H.
struct Secular {
  const Vector& evals;
  const Vector& gamma;
  double sigma;

  double step_norm(double lambda) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
      const double d = evals(i) + lambda;
      if (gamma(i) != 0.0) acc += gamma(i) * gamma(i) / (d * d);
    }
    return std::sqrt(acc);
  }

  // phi(lambda) = 1/||s(lambda)|| - sigma/(2 lambda); increasing and concave.
  void phi(double lambda, double& value, double& slope, double& norm) const {
    double n2 = 0.0;
    double w = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
      if (gamma(i) == 0.0) continue;
      const double d = evals(i) + lambda;
      const double c = gamma(i) * gamma(i);
      n2 += c / (d * d);
      w += c / (d * d * d);
    }
    norm = std::sqrt(n2);
    value = 1.0 / norm - sigma / (2.0 * lambda);
    slope = w / (n2 * norm) + sigma / (2.0 * lambda * lambda);
  }
};

Vector leftmost_eigenvector(const Matrix& Q) {
  Vector u = Q.col(0);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > 1e-14) {
      if (u(i) < 0.0) u = -u;
      break;
    }
  }
  return u;
}

StepResult finish_p2(const Vector& g, const Matrix& H, double sigma, Vector s, double lambda,
                     double lambda_min, bool hard) {
  StepResult r;
  r.step = std::move(s);
  r.multiplier = lambda;
  r.taylor_grad_norm = (g + H * r.step).norm();
  r.taylor_min_curv = lambda_min;
  const double sn = r.step.norm();
  const double value = g.dot(r.step) + 0.5 * r.step.dot(H * r.step) + sigma / 6.0 * sn * sn * sn;
  r.model_reduction = -value;
  r.hard_case = hard;
  return r;
}

}  // namespace

StepResult solve_p1(const Vector& g, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("solve_p1: sigma must be positive and finite");
  }
  const double gn = g.norm();
  if (!(gn > 0.0)) throw std::invalid_argument("solve_p1: zero gradient");
  if (!std::isfinite(gn)) throw std::invalid_argument("solve_p1: non-finite gradient");
  StepResult r;
  r.step = -g / sigma;
  r.taylor_grad_norm = gn;
  r.model_reduction = gn * gn / (2.0 * sigma);
  return r;
}

StepResult solve_p2(const Vector& g, const Matrix& H, double sigma, double tol) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("solve_p2: sigma must be positive and finite");
  }
  if (H.rows() != g.size() || H.cols() != g.size()) {
    throw std::invalid_argument("solve_p2: Hessian shape does not match gradient");
  }
  if (!g.allFinite() || !H.allFinite()) throw std::invalid_argument("solve_p2: non-finite input");

  const Eigen::Index n = g.size();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
  if (eig.info() != Eigen::Success) throw std::runtime_error("solve_p2: eigendecomposition failed");
  const Vector& evals = eig.eigenvalues();
  const Matrix& Q = eig.eigenvectors();
  const double lambda_min = evals(0);
  const double gnorm = g.norm();

  if (gnorm == 0.0 && lambda_min >= 0.0) {
    throw std::invalid_argument("solve_p2: stationary point with nonnegative curvature");
  }

  Vector gamma = Q.transpose() * g;
  const double lambda_lo = std::max(0.0, -lambda_min);

  // Components on the leftmost eigenspace.
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  double left_proj2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (evals(i) - lambda_min <= 1e-10 * scale) left_proj2 += gamma(i) * gamma(i);
  }
  const bool orthogonal_to_left = std::sqrt(left_proj2) <= kHardCaseProjectionTol * gnorm;

  if (orthogonal_to_left && lambda_lo > 0.0) {
    Vector gamma_perp = gamma;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (evals(i) - lambda_min <= 1e-10 * scale) gamma_perp(i) = 0.0;
    }
    const Secular sec{evals, gamma_perp, sigma};
    const double pn = sec.step_norm(lambda_lo);
    const double target = 2.0 * lambda_lo / sigma;
    if (pn <= target) {
      Vector coeff(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        coeff(i) = gamma_perp(i) == 0.0 ? 0.0 : -gamma_perp(i) / (evals(i) + lambda_lo);
      }
      Vector s = Q * coeff;
      const double alpha = std::sqrt(std::max(0.0, target * target - pn * pn));
      s += alpha * leftmost_eigenvector(Q);
      return finish_p2(g, H, sigma, std::move(s), lambda_lo, lambda_min, true);
    }
  }

  // Regular case: the root lies strictly right of lambda_lo.
  const Secular sec{evals, gamma, sigma};
  double lo = lambda_lo;
  double hi = lambda_lo + std::sqrt(sigma * gnorm / 2.0);
  {
    double v, d, nrm;
    sec.phi(hi, v, d, nrm);
    int guard = 0;
    while (!(v >= 0.0) && guard++ < 60) {
      hi = lambda_lo + 2.0 * (hi - lambda_lo) + 1e-300;
      sec.phi(hi, v, d, nrm);
    }
    if (!(v >= 0.0)) throw std::runtime_error("solve_p2: failed to bracket the secular root");
  }

  const double residual_target = tol * std::max(1.0, gnorm);
  double lambda = hi;
  bool converged = false;
  for (int it = 0; it < kMaxSecularIterations; ++it) {
    double v, d, nrm;
    sec.phi(lambda, v, d, nrm);
    // ||grad m(s(lambda))|| = |sigma ||s|| / 2 - lambda| ||s||.
    const double grad_m = std::abs(0.5 * sigma * nrm - lambda) * nrm;
    if (grad_m <= 0.1 * residual_target) {
      converged = true;
      break;
    }
    if (v > 0.0) {
      hi = lambda;
    } else {
      lo = lambda;
    }
    double next = lambda - v / d;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
      lambda = hi;
      converged = true;
      break;
    }
    lambda = next;
  }
  if (!converged) throw std::runtime_error("solve_p2: secular iteration did not converge");

  Vector coeff(n);
  for (Eigen::Index i = 0; i < n; ++i) coeff(i) = -gamma(i) / (evals(i) + lambda);
  Vector s = Q * coeff;
  return finish_p2(g, H, sigma, std::move(s), lambda, lambda_min, false);
}

StepResult solve_model(const RegularizedModel& model, double tol) {
  if (model.degree() == 1) return solve_p1(model.gradient(), model.sigma());
  return solve_p2(model.gradient(), model.hessian(), model.sigma(), tol);
}

bool certify(const StepResult& step, const RegularizedModel& model, double theta1,
             std::optional<double> theta2) {
  if (step.step.size() != model.dimension() || !step.step.allFinite()) return false;
  const int p = model.degree();
  const double sn = step.step.norm();
  const double sigma = model.sigma();

  if (!(model_value(model, step.step) < 0.0)) return false;

  const double grad_rhs = theta1 * sigma / factorial(p) * std::pow(sn, p);
  if (taylor_gradient_norm(model, step.step) > grad_rhs * (1.0 + kCertifySlack)) return false;

  if (theta2) {
    if (p < 2) return false;
    const double curv = min_eigenvalue(model.hessian());
    const double curv_rhs = -*theta2 * sigma / factorial(p - 1) * std::pow(sn, p - 1);
    if (curv < curv_rhs * (1.0 + kCertifySlack)) return false;
  }
  return true;
}

}  // namespace offo
