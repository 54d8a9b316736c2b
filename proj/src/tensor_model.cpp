#include "offo/tensor_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace offo {

DerivativeBundle DerivativeBundle::make(Vector gradient, std::optional<Matrix> hessian,
                                        std::optional<double> fvalue) {
  DerivativeBundle b{std::move(gradient), std::move(hessian), fvalue};
  if (b.hessian) {
    if (b.hessian->rows() != b.gradient.size() || b.hessian->cols() != b.gradient.size()) {
      throw std::invalid_argument("hessian shape does not match gradient length");
    }
    const Matrix sym = 0.5 * (*b.hessian + b.hessian->transpose());
    *b.hessian = sym;
  }
  return b;
}

bool DerivativeBundle::derivatives_finite() const {
  if (!gradient.allFinite()) return false;
  return !hessian || hessian->allFinite();
}

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) throw std::invalid_argument("min_eigenvalue of empty matrix");
  if (symmetric.rows() == 1) return symmetric(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial of negative integer");
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

RegularizedModel::RegularizedModel(DerivativeBundle bundle, double sigma, int degree)
    : bundle_(std::move(bundle)), sigma_(sigma), degree_(degree) {
  if (degree_ != 1 && degree_ != 2) {
    throw std::invalid_argument("regularized model degree must be 1 or 2, got " +
                                std::to_string(degree_));
  }
  if (!(sigma_ > 0.0)) throw std::invalid_argument("regularization parameter must be positive");
  if (degree_ == 2 && !bundle_.hessian) {
    throw std::invalid_argument("degree-2 model requires a Hessian");
  }
}

namespace {

void check_dimension(const RegularizedModel& model, const Vector& s) {
  if (s.size() != model.dimension()) {
    throw std::invalid_argument("step length " + std::to_string(s.size()) +
                                " does not match model dimension " +
                                std::to_string(model.dimension()));
  }
}

}  // namespace

double regularization_term(double sigma, int degree, double step_norm) {
  return sigma / factorial(degree + 1) * std::pow(step_norm, degree + 1);
}

double taylor_decrease(const RegularizedModel& model, const Vector& s) {
  check_dimension(model, s);
  double t = model.gradient().dot(s);
  if (model.degree() == 2) t += 0.5 * s.dot(model.hessian() * s);
  return -t;
}

double model_value(const RegularizedModel& model, const Vector& s) {
  return -taylor_decrease(model, s) + regularization_term(model.sigma(), model.degree(), s.norm());
}

Vector taylor_gradient(const RegularizedModel& model, const Vector& s) {
  check_dimension(model, s);
  if (model.degree() == 1) return model.gradient();
  return model.gradient() + model.hessian() * s;
}

Vector model_gradient(const RegularizedModel& model, const Vector& s) {
  const int p = model.degree();
  const double scale = model.sigma() / factorial(p) * std::pow(s.norm(), p - 1);
  return taylor_gradient(model, s) + scale * s;
}

double taylor_gradient_norm(const RegularizedModel& model, const Vector& s) {
  return taylor_gradient(model, s).norm();
}

}  // namespace offo
