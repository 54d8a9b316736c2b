// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "invariant_monitor.hpp"
#include "offo/batch.hpp"
#include "offo/problems.hpp"
#include "offo/profile.hpp"
#include "offo/solvers.hpp"
#include "offo/subsolver.hpp"
#include "offo/worstcase.hpp"

using namespace offo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Verdict {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int g_failures = 0;

void criterion(const std::string& id, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.ok = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) v.check(false, "runtime " + std::to_string(secs) + " s over limit");
  std::ostringstream line;
  line.precision(3);
  line << id << ' ' << (v.ok ? "PASS" : "FAIL") << " [" << std::fixed << secs << " s, limit "
       << limit_s << " s]";
  if (!v.detail.empty()) line << ' ' << v.detail;
  std::cout << line.str() << std::endl;
  if (!v.ok) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// AC1
Verdict first_order_sharpness() {
  Verdict v;
  const struct { int p; double eps; long long want; } cases[] = {
      {1, 0.1, 100}, {1, 0.05, 400}, {2, 0.25, 8}, {2, 0.1, 32}};
  for (const auto& c : cases) {
    const SlowSequence q = gen_first_order(c.p, c.eps, 1.0);
    const ReplayResult r = replay_sequence(q);
    const std::string tag = "(p=" + std::to_string(c.p) + ", eps=" + fmt(c.eps) + ")";
    v.check(q.k_eps == c.want, tag + " k_eps=" + std::to_string(q.k_eps));
    v.check(r.exact_count && r.outcome.iterations == c.want,
            tag + " replay took " + std::to_string(r.outcome.iterations));
    v.check(std::abs(r.outcome.final_grad_norm - c.eps) <= 4 * 2.2e-16 * c.eps,
            tag + " final |g|=" + fmt(r.outcome.final_grad_norm));
    v.check(r.max_sigma_rel_dev <= 1e-12 && r.max_nu_rel_dev <= 1e-12, tag + " sigma/nu drift");
  }
  return v;
}

// AC2
Verdict second_order_sharpness() {
  Verdict v;
  for (auto [eps, want] : {std::pair{0.25, 64LL}, {0.5, 8LL}}) {
    const SlowSequence q = gen_second_order(2, eps, 1.0);
    const ReplayResult r = replay_sequence(q);
    const std::string tag = "(eps2=" + fmt(eps) + ")";
    v.check(q.k_eps == want, tag + " k_eps=" + std::to_string(q.k_eps));
    v.check(r.exact_count && r.outcome.iterations == want, tag + " replay count");
    v.check(q.value.back() == -eps && r.outcome.final_lambda_min == -eps, tag + " final H");
  }
  return v;
}

// AC3
Verdict divergence() {
  Verdict v;
  const DivergenceRun r = run_divergence(1.0, 1.0, 10000);
  double sig_dev = 0.0;
  for (double s : r.sigma) sig_dev = std::max(sig_dev, std::abs(s / r.sigma.front() - 1.0));
  v.check(sig_dev <= 1e-12, "sigma drift " + fmt(sig_dev));
  bool g_exact = true, x_exact = true;
  for (double g : r.grad_norm) g_exact = g_exact && g == std::sqrt(2.0);
  for (std::size_t k = 0; k < r.x.size(); ++k) x_exact = x_exact && r.x[k](0) == double(k);
  v.check(g_exact, "gradient norm not sqrt(2)");
  v.check(x_exact && r.x.size() == 10001, "[x_k]_1 != k");
  return v;
}

// AC4
Verdict invariant_suite() {
  Verdict v;
  int with_lipschitz = 0, solved = 0;
  for (const ProblemOracle& p : make_suite()) {
    OffoConfig c;
    c.strict_mode = true;
    c.eps1 = 1e-6;
    c.max_iter = 5000;
    const auto L = p.meta.lipschitz_for(2);
    if (L) ++with_lipschitz;
    offo::testing::InvariantMonitor mon(c, L);
    const RunOutcome out = run_offar(p, c, mon.observer());
    solved += out.status == RunStatus::FirstOrderPoint ? 1 : 0;
    const auto bad = mon.violations();
    v.check(bad.empty(), p.name + ": " + std::to_string(bad.size()) + " violations" +
                             (bad.empty() ? "" : " (" + bad.front() + ")"));
    v.check(out.certificate_failures == 0, p.name + ": certificate failures");
  }
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("Lipschitz checks on ") +
              std::to_string(with_lipschitz) + " problem(s), " + std::to_string(solved) +
              "/12 reached eps1";
  return v;
}

// AC5
Verdict complexity_envelope() {
  Verdict v;
  std::ostringstream counts;
  for (const char* name : {"tridia", "rosenbr"}) {
    const ProblemOracle p = find_problem(name);
    double C = 0.0;
    counts << name << ':';
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      OffoConfig c;
      c.eps1 = eps;
      const RunOutcome out = run_offar(p, c);
      v.check(out.status == RunStatus::FirstOrderPoint, std::string(name) + " unsolved");
      const double n = std::max(1, out.iterations);
      if (eps == 1e-1) C = n * std::pow(eps, 1.5);
      counts << ' ' << out.iterations;
      v.check(n <= 2.0 * C * std::pow(eps, -1.5),
              std::string(name) + " N(" + fmt(eps) + ")=" + fmt(n) + " above envelope");
    }
    counts << ' ';
  }
  if (v.ok) v.detail = counts.str();
  return v;
}

double cubic(const Vector& g, const Matrix& H, double sigma, const Vector& s) {
  const double n = s.norm();
  return g.dot(s) + 0.5 * s.dot(H * s) + sigma / 6.0 * n * n * n;
}

// Coarse grid over the box of half-width `radius`, refined around the best coarse point.
double grid_minimum(const Vector& g, const Matrix& H, double sigma, double radius) {
  const int n = static_cast<int>(g.size());
  Vector best = Vector::Zero(n);
  double fbest = 0.0;
  auto scan = [&](const Vector& centre, double half, double h) {
    const int m = static_cast<int>(std::ceil(half / h));
    Vector s(n);
    const Vector c = centre;
    for (int i = -m; i <= m; ++i) {
      for (int j = (n == 2 ? -m : 0); j <= (n == 2 ? m : 0); ++j) {
        s(0) = c(0) + i * h;
        if (n == 2) s(1) = c(1) + j * h;
        const double f = cubic(g, H, sigma, s);
        if (f < fbest) fbest = f, best = s;
      }
    }
  };
  scan(Vector::Zero(n), radius, 1e-2);
  scan(best, 2e-2, n == 1 ? 1e-6 : 2e-4);
  scan(best, 4e-4, n == 1 ? 1e-8 : 4e-6);
  return fbest;
}

// AC6
Verdict subproblem_oracle() {
  Verdict v;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0), us(0.5, 4.0);
  double worst_grid = 0.0, worst_root = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 2;
    Vector g(n);
    Matrix A(n, n);
    for (int i = 0; i < n; ++i) {
      g(i) = u(rng);
      for (int j = 0; j < n; ++j) A(i, j) = u(rng);
    }
    const Matrix H = 0.5 * (A + A.transpose());
    const double sigma = us(rng);
    const StepResult r = solve_p2(g, H, sigma);
    const double m = cubic(g, H, sigma, r.step);
    const double grid = grid_minimum(g, H, sigma, 2 * r.step.norm() + 1);
    worst_grid = std::max(worst_grid, std::abs(m - grid));
    v.check(m <= grid + 1e-6 && grid - m <= 1e-6, "instance " + std::to_string(trial));
    if (n == 1) {
      // Bisection on h t + sigma/2 t^2 = |g| over t >= max(0, -2h/sigma).
      const double gg = g(0), h = H(0, 0);
      auto q = [&](double t) { return h * t + 0.5 * sigma * t * t - std::abs(gg); };
      double lo = std::max(0.0, -2.0 * h / sigma), hi = lo + 1.0;
      while (q(hi) < 0.0) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (q(mid) < 0.0 ? lo : hi) = mid;
      }
      const double root = (gg > 0 ? -1.0 : 1.0) * 0.5 * (lo + hi);
      worst_root = std::max(worst_root, std::abs(root - r.step(0)));
      v.check(std::abs(root - r.step(0)) <= 1e-9, "bisection mismatch " + std::to_string(trial));
    }
  }
  if (v.ok) v.detail = "max |m - grid|=" + fmt(worst_grid) + ", max root gap=" + fmt(worst_root);
  return v;
}

std::string run_cli(const std::string& args, int& code) {
  const std::string cmd = std::string(OFFO_CLI_PATH) + " " + args + " 2>&1";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    code = -1;
    return out;
  }
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int st = pclose(pipe);
  code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

std::string field(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + "=");
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size() + 1;
  return out.substr(start, out.find_first_of(" \n", start) - start);
}

// AC7
Verdict bounds_cli() {
  Verdict v;
  const std::string base = "bounds --p 2 --L 1 --sigma0 1 --theta1 1 --vartheta 1 ";
  int code = 0;
  const std::string out = run_cli(base + "--eps1 1", code);
  v.check(code == 0, "exit code " + std::to_string(code));
  v.check(field(out, "k_star") == "6", "k_star=" + field(out, "k_star"));
  const double a = std::stod(field(run_cli(base + "--eps1 1", code), "k_star_raw"));
  const double b = std::stod(field(run_cli(base + "--eps1 0.5", code), "k_star_raw"));
  const double want = std::pow(2.0, 1.5);
  v.check(std::abs(b / a - want) <= 1e-9 * want, "scaling " + fmt(b / a));
  return v;
}

// AC8
Verdict noise_robustness() {
  Verdict v;
  BenchConfig c;
  c.problems = suite_names();
  c.algorithms = {Algorithm::Ar2, Algorithm::Offar2a};
  c.levels = {0.05, 0.25, 0.5};
  for (std::uint64_t s = 1; s <= 10; ++s) c.seeds.push_back(s);
  c.eps1 = 1e-3;
  const BenchResult r = run_bench(c);
  auto rho = [&](const char* alg, double level) { return r.rho.at({alg, level}); };
  std::ostringstream d;
  d << "rho ar2=" << fmt(rho("ar2", 0.05)) << '/' << fmt(rho("ar2", 0.25)) << '/'
    << fmt(rho("ar2", 0.5)) << " offar2a=" << fmt(rho("offar2a", 0.05)) << '/'
    << fmt(rho("offar2a", 0.25)) << '/' << fmt(rho("offar2a", 0.5));
  v.check(rho("offar2a", 0.25) >= rho("ar2", 0.25), "offar2a below ar2 at 0.25");
  v.check(rho("offar2a", 0.5) >= rho("ar2", 0.5), "offar2a below ar2 at 0.5");
  v.check(rho("ar2", 0.5) <= rho("ar2", 0.05) - 30.0, "ar2 drop under 30 points");
  v.detail = d.str() + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// Straightforward profile area: rho held at rho(1) on [0, 1], exact step integral on [1, 50].
std::vector<double> reference_pi(const std::vector<std::vector<double>>& c) {
  const std::size_t np = c.size(), na = c[0].size();
  std::vector<double> pi;
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<double> r(np, kInf);
    for (std::size_t p = 0; p < np; ++p) {
      const double best = *std::min_element(c[p].begin(), c[p].end());
      if (std::isfinite(c[p][a])) r[p] = c[p][a] / best;
    }
    auto rho = [&](double t) {
      return static_cast<double>(std::count_if(r.begin(), r.end(), [t](double x) { return x <= t; })) /
             static_cast<double>(np);
    };
    std::vector<double> bp = {1.0, 50.0};
    for (double x : r) if (x > 1.0 && x < 50.0) bp.push_back(x);
    std::sort(bp.begin(), bp.end());
    double area = rho(1.0);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) area += rho(bp[i]) * (bp[i + 1] - bp[i]);
    pi.push_back(area / 50.0);
  }
  return pi;
}

// AC9
Verdict profile_math() {
  Verdict v;
  const ProfileTable t = compute_profile({{10, 20}});
  v.check(std::abs(t.pi[0] - 1.0) <= 1e-15 && std::abs(t.pi[1] - 0.96) <= 1e-15,
          "pi=" + fmt(t.pi[0]) + "," + fmt(t.pi[1]));
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> dp(1, 20), da(1, 5), cost(1, 500);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> c(dp(rng), std::vector<double>(da(rng)));
    for (auto& row : c) for (double& x : row) x = u(rng) < 0.2 ? kInf : cost(rng);
    const auto want = reference_pi(c);
    const auto got = compute_profile(c).pi;
    for (std::size_t a = 0; a < want.size(); ++a) {
      v.check(std::abs(want[a] - got[a]) <= 1e-12, "random matrix " + std::to_string(trial));
    }
  }
  return v;
}

// AC10
Verdict saddle_escape() {
  Verdict v;
  OffoConfig c;
  c.eps1 = 1e-4;
  c.eps2 = 1e-4;
  const RunOutcome out = run_moffar(offo::testing::double_well(offo::testing::vec({0, 1})), c);
  v.check(out.status == RunStatus::SecondOrderPoint, "status " + to_string(out.status));
  v.check(out.final_grad_norm <= 1e-4, "grad " + fmt(out.final_grad_norm));
  v.check(out.final_lambda_min && *out.final_lambda_min >= -1e-4, "curvature");
  v.check(std::abs(std::abs(out.final_x(0)) - 1.0) <= 1e-3, "x=" + fmt(out.final_x(0)));
  if (v.ok) {
    v.detail = "x=(" + fmt(out.final_x(0)) + ", " + fmt(out.final_x(1)) + ") after " +
               std::to_string(out.iterations) + " iterations";
  }
  return v;
}

}  // namespace

int main() {
  criterion("AC1 first-order sharpness", 1.0, first_order_sharpness);
  criterion("AC2 second-order sharpness", 1.0, second_order_sharpness);
  criterion("AC3 simplified-update divergence", 1.0, divergence);
  criterion("AC4 invariant suite", 120.0, invariant_suite);
  criterion("AC5 complexity envelope", 60.0, complexity_envelope);
  criterion("AC6 subproblem oracle equivalence", 60.0, subproblem_oracle);
  criterion("AC7 theory-bound calculator", 10.0, bounds_cli);
  criterion("AC8 noise robustness", 600.0, noise_robustness);
  criterion("AC9 profile mathematics", 10.0, profile_math);
  criterion("AC10 second-order saddle escape", 1.0, saddle_escape);
  std::cout << (g_failures == 0 ? "ALL PASS" : std::to_string(g_failures) + " FAILED") << std::endl;
  return g_failures == 0 ? 0 : 1;
}
