#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "offo/types.hpp"

namespace offo {

/// Analytic facts about a problem, used by bound calculators and invariant checks.
struct ProblemMeta {
  /// Global Lipschitz constant of the p-th derivative, keyed by p.
  std::map<int, double> lipschitz;
  std::optional<double> f_low;
  /// Lower bound on the curvature of derivatives of degree 2..p; always <= 0.
  std::optional<double> kappa_high;
  std::optional<Vector> minimizer;
  std::optional<double> minimum;

  std::optional<double> lipschitz_for(int p) const {
    auto it = lipschitz.find(p);
    if (it == lipschitz.end()) return std::nullopt;
    return it->second;
  }
};

using Evaluator = std::function<DerivativeBundle(const Vector&)>;

/// A problem: dimension, start point, derivative evaluator and metadata.
///
/// Copies share the evaluator. Stateful evaluators (noise wrappers) must not be shared
/// between concurrent runs.
struct ProblemOracle {
  std::string name;
  Eigen::Index dimension = 0;
  Vector start;
  Evaluator evaluate;
  ProblemMeta meta;
  /// Box around the start point on which the evaluator is finite.
  Vector box_lower;
  Vector box_upper;
};

}  // namespace offo
