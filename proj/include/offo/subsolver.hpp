#pragma once

#include <optional>

#include "offo/tensor_model.hpp"

namespace offo {

inline constexpr double kDefaultSecularTol = 1e-10;

/// A step returned by one of the regularized-model minimizers.
struct StepResult {
  Vector step;
  /// Secular multiplier lambda = sigma ||s|| / 2 (degree 2 only; 0 otherwise).
  double multiplier = 0.0;
  double taylor_grad_norm = 0.0;
  /// lambda_min of the Taylor Hessian at the step (degree 2 only).
  std::optional<double> taylor_min_curv;
  /// m(0) - m(s).
  double model_reduction = 0.0;
  bool hard_case = false;
};

/// Global minimizer of g's + sigma/2 ||s||^2, i.e. s = -g / sigma.
StepResult solve_p1(const Vector& g, double sigma);

/// Global minimizer of g's + s'Hs/2 + sigma/6 ||s||^3.
///
/// Works in the eigenbasis of H and solves the secular equation
/// ||(H + lambda I)^{-1} g|| = 2 lambda / sigma for lambda >= max(0, -lambda_min(H)) with a
/// safeguarded Newton iteration. When g has no component on the leftmost eigenspace and the
/// secular equation has no root to the right of -lambda_min, a leftmost eigenvector is added
/// to reach the required norm (the hard case). `tol` bounds the model gradient at the returned
/// step relative to max(1, ||g||).
StepResult solve_p2(const Vector& g, const Matrix& H, double sigma,
                    double tol = kDefaultSecularTol);

/// Dispatches on the model degree.
StepResult solve_model(const RegularizedModel& model, double tol = kDefaultSecularTol);

/// Descent, gradient and (when theta2 is given) curvature certificates for a step.
///
/// Every quantity is recomputed from `model` and `step.step`; the cached fields of `step`
/// are not trusted.
bool certify(const StepResult& step, const RegularizedModel& model, double theta1,
             std::optional<double> theta2 = std::nullopt);

}  // namespace offo
