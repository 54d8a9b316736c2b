#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "offo/oracle.hpp"

namespace offo::testing {

inline ProblemOracle make_problem(std::string name, Vector start, Evaluator evaluate) {
  ProblemOracle o;
  o.name = std::move(name);
  o.dimension = start.size();
  o.box_lower = start.array() - 10.0;
  o.box_upper = start.array() + 10.0;
  o.start = std::move(start);
  o.evaluate = std::move(evaluate);
  return o;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

/// 1/2 ||x||^2 in R^n.
inline ProblemOracle half_norm_squared(const Vector& start) {
  return make_problem("halfnorm", start, [](const Vector& x) {
    return DerivativeBundle::make(x, Matrix::Identity(x.size(), x.size()), 0.5 * x.squaredNorm());
  });
}

/// x^4/4 - x^2/2 + y^2, saddle at the origin, minimizers (+-1, 0).
inline ProblemOracle double_well(const Vector& start) {
  return make_problem("doublewell", start, [](const Vector& v) {
    const double x = v(0), y = v(1);
    Matrix H(2, 2);
    H << 3 * x * x - 1, 0, 0, 2;
    return DerivativeBundle::make(vec({x * x * x - x, 2 * y}), H,
                                  0.25 * x * x * x * x - 0.5 * x * x + y * y);
  });
}

}  // namespace offo::testing
