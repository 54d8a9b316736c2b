#include "offo/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace offo {

double ProfileCurve::at(double t) const {
  if (tau.empty()) return 0.0;
  t = std::max(t, 1.0);
  auto it = std::upper_bound(tau.begin(), tau.end(), t);
  if (it == tau.begin()) return 0.0;
  return value[static_cast<std::size_t>(it - tau.begin()) - 1];
}

ProfileTable compute_profile(const std::vector<std::vector<double>>& costs,
                             std::vector<std::string> problems,
                             std::vector<std::string> algorithms) {
  if (costs.empty() || costs.front().empty()) throw std::invalid_argument("empty cost matrix");
  const std::size_t P = costs.size();
  const std::size_t A = costs.front().size();
  for (const auto& row : costs) {
    if (row.size() != A) throw std::invalid_argument("ragged cost matrix");
    for (double c : row) {
      if (std::isnan(c) || c < 0.0) throw std::invalid_argument("costs must be >= 0 or infinity");
    }
  }
  if (problems.empty()) {
    for (std::size_t p = 0; p < P; ++p) problems.push_back("p" + std::to_string(p));
  }
  if (algorithms.empty()) {
    for (std::size_t a = 0; a < A; ++a) algorithms.push_back("a" + std::to_string(a));
  }
  if (problems.size() != P || algorithms.size() != A) {
    throw std::invalid_argument("label count does not match cost matrix");
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  ProfileTable t;
  t.problems = std::move(problems);
  t.algorithms = std::move(algorithms);
  t.costs = costs;
  t.ratio.assign(P, std::vector<double>(A, inf));
  for (std::size_t p = 0; p < P; ++p) {
    const double best = *std::min_element(costs[p].begin(), costs[p].end());
    if (!std::isfinite(best)) continue;
    for (std::size_t a = 0; a < A; ++a) {
      if (!std::isfinite(costs[p][a])) continue;
      // Zero-cost runs (solved at the start point) tie with each other.
      t.ratio[p][a] = best > 0.0 ? costs[p][a] / best : (costs[p][a] == 0.0 ? 1.0 : inf);
    }
  }

  const double scale = 1.0 / static_cast<double>(P);
  for (std::size_t a = 0; a < A; ++a) {
    std::vector<double> r;
    double area = 0.0;
    double solved = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      if (std::isfinite(costs[p][a])) solved += 1.0;
      const double q = t.ratio[p][a];
      if (q <= kProfileTauMax) {
        r.push_back(q);
        area += q > 1.0 ? kProfileTauMax - q : kProfileTauMax;
      }
    }
    std::sort(r.begin(), r.end());
    ProfileCurve curve;
    curve.tau.push_back(1.0);
    curve.value.push_back(0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double v = static_cast<double>(i + 1) * scale;
      if (r[i] == curve.tau.back()) {
        curve.value.back() = v;
      } else {
        curve.tau.push_back(r[i]);
        curve.value.push_back(v);
      }
    }
    t.curves.push_back(std::move(curve));
    t.pi.push_back(area * scale / kProfileTauMax);
    t.rho_stat.push_back(100.0 * solved * scale);
  }
  return t;
}

}  // namespace offo
