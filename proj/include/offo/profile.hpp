#pragma once

#include <string>
#include <vector>

namespace offo {

/// Right end of the profile abscissa.
inline constexpr double kProfileTauMax = 50.0;

/// Step function rho(tau): value[i] holds on [tau[i], tau[i+1]); the last value holds to
/// kProfileTauMax. tau[0] = 1.
struct ProfileCurve {
  std::vector<double> tau;
  std::vector<double> value;

  double at(double tau) const;
};

/// Performance profile over a problems x algorithms cost matrix (infinity marks failure).
struct ProfileTable {
  std::vector<std::string> problems;
  std::vector<std::string> algorithms;
  std::vector<std::vector<double>> costs;
  /// ratio[p][a] = costs[p][a] / min_a costs[p][a]; infinity on failure or when no algorithm
  /// solved p.
  std::vector<std::vector<double>> ratio;
  std::vector<ProfileCurve> curves;
  /// Area under rho_a on [0, 50] divided by 50, the curve being held at rho_a(1) below 1.
  std::vector<double> pi;
  /// Percent of problems with finite cost.
  std::vector<double> rho_stat;
};

/// Throws std::invalid_argument on an empty or ragged matrix, or on negative or NaN costs.
/// Problems no algorithm solved stay in every denominator.
ProfileTable compute_profile(const std::vector<std::vector<double>>& costs,
                             std::vector<std::string> problems = {},
                             std::vector<std::string> algorithms = {});

}  // namespace offo
