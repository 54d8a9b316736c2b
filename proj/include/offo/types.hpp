#pragma once

#include <optional>

#include <Eigen/Dense>

namespace offo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Derivatives returned by a problem oracle at one point.
///
/// `fvalue` is diagnostic for the function-free solvers: they never read it.
/// The AR2 baseline and the invariant checks do.
struct DerivativeBundle {
  Vector gradient;
  std::optional<Matrix> hessian;
  std::optional<double> fvalue;

  /// Builds a bundle, symmetrizing the Hessian when one is given.
  static DerivativeBundle make(Vector gradient, std::optional<Matrix> hessian = std::nullopt,
                               std::optional<double> fvalue = std::nullopt);

  Eigen::Index dimension() const { return gradient.size(); }

  /// True when the gradient and Hessian contain only finite entries.
  bool derivatives_finite() const;
};

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& symmetric);

/// n! as a double (n >= 0).
double factorial(int n);

}  // namespace offo
