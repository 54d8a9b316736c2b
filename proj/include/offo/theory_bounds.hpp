#pragma once

#include <optional>
#include <string>
#include <vector>

#include "offo/oracle.hpp"
#include "offo/solvers.hpp"

namespace offo {

/// Problem and algorithm constants entering the worst-case iteration bounds.
/// Works for any degree p >= 1; sigma0 is also nu_0.
struct BoundInputs {
  int p = 2;
  std::optional<double> lipschitz;
  std::optional<double> sigma0;
  std::optional<double> f_low;
  std::optional<double> kappa_high;
  std::optional<double> g0_norm;
  std::optional<double> f0;
  double theta1 = 1.0;
  double theta2 = 1.0;
  double vartheta = 1.0;
  double eps1 = 1e-6;
  std::optional<double> eps2;
};

/// Every named constant of the analysis. Quantities whose inputs are absent stay empty
/// and the missing inputs are listed in `missing`.
struct BoundReport {
  int p = 2;
  /// Iteration after which nu_k >= 2 L / vartheta; `k_star_raw` is the value before ceiling.
  double k_star_raw = 0.0;
  long long k_star = 0;
  std::optional<double> eta;
  std::optional<double> kappa1;
  std::optional<double> nu_max;
  /// Upper bound on f at the first iterate with nu_k >= 2 L / vartheta.
  std::optional<double> f_k1_bound;
  std::optional<double> sigma_max;
  std::optional<double> kappa_offar;
  /// Iterations to reach ||g|| <= eps1.
  std::optional<double> first_order_bound;

  std::optional<double> kappa_both;
  std::optional<double> k_2star_raw;
  std::optional<long long> k_2star;
  std::optional<double> kappa_moffar;
  /// Iterations to reach ||g|| <= eps1 and lambda_min >= -eps2.
  std::optional<double> second_order_bound;

  std::vector<std::string> missing;
};

/// Evaluates the bounds. Throws std::invalid_argument when the Lipschitz constant or sigma0
/// is absent (the message lists them) or when a parameter is out of range.
BoundReport theory_bounds(const BoundInputs& in);

/// Convenience overload: L_p, f_low and kappa_high from the metadata, the algorithmic
/// parameters from the config (degree, theta1, theta2, vartheta, eps1, eps2), and the
/// start-point data supplied by the caller.
BoundReport theory_bounds(const ProblemMeta& meta, const OffoConfig& config, double sigma0,
                          std::optional<double> g0_norm, std::optional<double> f0);

}  // namespace offo
