#pragma once

#include "offo/types.hpp"

namespace offo {

/// m(s) = T_p(x, s) + sigma/(p+1)! ||s||^{p+1}, with the constant term f(x) dropped.
///
/// Only degrees 1 and 2 are represented; degree 2 requires a Hessian in the bundle.
class RegularizedModel {
 public:
  RegularizedModel(DerivativeBundle bundle, double sigma, int degree);

  const DerivativeBundle& bundle() const { return bundle_; }
  const Vector& gradient() const { return bundle_.gradient; }
  const Matrix& hessian() const { return *bundle_.hessian; }
  double sigma() const { return sigma_; }
  int degree() const { return degree_; }
  Eigen::Index dimension() const { return bundle_.dimension(); }

 private:
  DerivativeBundle bundle_;
  double sigma_;
  int degree_;
};

/// T(x,0) - T(x,s) = -(g's [+ s'Hs/2]).
double taylor_decrease(const RegularizedModel& model, const Vector& s);

/// m(s) - f(x); zero at s = 0.
double model_value(const RegularizedModel& model, const Vector& s);

/// g + Hs + sigma/p! ||s||^{p-1} s.
Vector model_gradient(const RegularizedModel& model, const Vector& s);

/// grad_s T(x,s) = g [+ Hs].
Vector taylor_gradient(const RegularizedModel& model, const Vector& s);

double taylor_gradient_norm(const RegularizedModel& model, const Vector& s);

/// sigma/(p+1)! ||s||^{p+1}
double regularization_term(double sigma, int degree, double step_norm);

}  // namespace offo
