#include "offo/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "offo/solvers.hpp"
#include "offo/subsolver.hpp"
#include "offo/trace.hpp"

namespace offo {

namespace {

constexpr double kSlack = 1e-12;

void require(bool ok, const std::string& what, long long k) {
  if (!ok) throw ConstructionError(what + " violated at k=" + std::to_string(k));
}

bool leq(double a, double b) { return a <= b + kSlack * std::max(1.0, std::abs(b)); }

void check_args(int p, int min_p, double eps, double sigma0) {
  if (p < min_p) throw std::invalid_argument("p too small for this construction");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw std::invalid_argument("sigma0 must be > 0");
}

// Shared recursion: s_k = (p! |v_k| / sigma_k)^{1/r}, sigma_{k+1} = sigma_k (1 + s_k^{p+1}).
SlowSequence build(int p, double eps, double sigma0, bool second) {
  SlowSequence q;
  q.p = p;
  q.second_order = second;
  q.eps = eps;
  q.sigma0 = sigma0;
  const double root = second ? p - 1.0 : p;
  q.k_eps = guarded_ceil(std::pow(eps, -(p + 1.0) / root));
  const double pf = factorial(p);
  const auto n = static_cast<std::size_t>(q.k_eps + 1);
  q.omega.resize(n);
  q.value.resize(n);
  q.s.resize(n);
  q.sigma.resize(n);
  q.f.resize(n);
  q.x.resize(n);
  if (second) {
    q.f0 = std::pow(2.0, (p + 1.0) / (p - 1.0)) * std::pow(pf / sigma0, 2.0 / (p - 1.0));
    q.sigma_max_bound =
        sigma0 + 2.0 * std::pow(std::pow(2.0 * pf, p + 1) / (sigma0 * sigma0), 1.0 / (p - 1.0));
    q.kappa_f = std::max({2.0, q.f0, q.sigma_max_bound / pf});
  } else {
    q.f0 = std::pow(2.0, (2.0 * p + 1.0) / p) * std::pow(pf / sigma0, 1.0 / p);
    q.sigma_max_bound = sigma0 + 2.0 * std::pow(std::pow(2.0 * pf, p + 1) / sigma0, 1.0 / p);
    q.kappa_f = std::max({2.0, q.f0, 2.0 * q.sigma_max_bound / pf});
  }
  const auto ke = static_cast<double>(q.k_eps);
  q.sigma[0] = sigma0;
  q.f[0] = q.f0;
  q.x[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    q.omega[k] = eps * (ke - static_cast<double>(k)) / ke;
    q.value[k] = -(eps + q.omega[k]);
    q.s[k] = std::pow(pf * std::abs(q.value[k]) / q.sigma[k], 1.0 / root);
    if (k + 1 < n) {
      q.sigma[k + 1] = q.sigma[k] + q.sigma[k] * std::pow(q.s[k], p + 1);
      q.f[k + 1] = second ? q.f[k] + 0.5 * q.value[k] * q.s[k] * q.s[k]
                          : q.f[k] + q.value[k] * q.s[k];
      q.x[k + 1] = q.x[k] + q.s[k];
    }
  }
  return q;
}

void verify(const SlowSequence& q) {
  const int p = q.p;
  const double pf = factorial(p);
  const double eps = q.eps;
  const double smax = q.sigma_max_bound;
  const std::string range = q.second_order ? "|H_k| in [eps, 2 eps]" : "|g_k| in [eps, 2 eps]";
  const auto n = static_cast<long long>(q.value.size());
  for (long long k = 0; k < n; ++k) {
    const double v = std::abs(q.value[k]);
    require(leq(eps, v) && leq(v, 2.0 * eps), range, k);
    require(q.f[k] >= -kSlack * q.f0 && leq(q.f[k], q.f0), "f_k in [0, f_0]", k);
    require(leq(q.sigma[k], smax), "sigma_k <= sigma_max", k);
    if (k < q.k_eps) {
      require(v > eps, "strict decrease above eps before k_eps", k);
    } else {
      require(v == eps, "terminal value equal to eps", k);
    }
    if (k + 1 >= n) continue;
    const double s = q.s[k];
    const double dv = std::abs(q.value[k + 1] - q.value[k]);
    if (q.second_order) {
      // f differs from the quadratic model by the curvature term; g stays zero while the
      // model gradient is H s; H moves by |omega_k - omega_{k+1}|.
      require(leq(std::abs(0.5 * q.value[k] * s * s), smax / pf * std::pow(s, p + 1)),
              "function interpolation bound", k);
      require(leq(std::abs(q.value[k] * s), smax / pf * std::pow(s, p)),
              "gradient interpolation bound", k);
      require(leq(dv, smax / pf * std::pow(s, p - 1)), "Hessian interpolation bound", k);
    } else {
      require(leq(std::abs(q.value[k] * s), 2.0 * smax / pf * std::pow(s, p + 1)),
              "function interpolation bound", k);
      require(leq(dv, smax / pf * std::pow(s, p)), "gradient interpolation bound", k);
    }
  }
}

}  // namespace

long long guarded_ceil(double x) {
  if (!std::isfinite(x)) throw std::overflow_error("guarded_ceil: non-finite argument");
  const double r = std::round(x);
  if (std::abs(x - r) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, r)) {
    return static_cast<long long>(r);
  }
  return static_cast<long long>(std::ceil(x));
}

SlowSequence gen_first_order(int p, double eps, double sigma0) {
  check_args(p, 1, eps, sigma0);
  SlowSequence q = build(p, eps, sigma0, false);
  verify(q);
  return q;
}

SlowSequence gen_second_order(int p, double eps2, double sigma0) {
  check_args(p, 2, eps2, sigma0);
  SlowSequence q = build(p, eps2, sigma0, true);
  verify(q);
  return q;
}

std::string sequence_to_csv(const SlowSequence& q) {
  std::ostringstream out;
  out << "k,omega,g_or_H,s,sigma,f\n";
  for (std::size_t k = 0; k < q.value.size(); ++k) {
    out << k << ',' << format_double(q.omega[k]) << ',' << format_double(q.value[k]) << ','
        << format_double(q.s[k]) << ',' << format_double(q.sigma[k]) << ','
        << format_double(q.f[k]) << '\n';
  }
  return out.str();
}

ProblemOracle scripted_oracle(const SlowSequence& seq) {
  ProblemOracle o;
  o.name = seq.second_order ? "slow2" : "slow1";
  o.dimension = 1;
  o.start = Vector::Zero(1);
  auto data = std::make_shared<const SlowSequence>(seq);
  o.evaluate = [data](const Vector& xv) {
    const double x = xv(0);
    const auto& xs = data->x;
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    std::size_t best = xs.size();
    double gap = std::numeric_limits<double>::infinity();
    for (auto c : {it, it == xs.begin() ? it : it - 1}) {
      if (c == xs.end()) continue;
      const double d = std::abs(*c - x);
      if (d < gap) {
        gap = d;
        best = static_cast<std::size_t>(c - xs.begin());
      }
    }
    if (best == xs.size() || gap > 1e-8 * std::max(1.0, std::abs(xs[best]))) {
      throw std::out_of_range("scripted oracle queried off the sequence");
    }
    Vector g(1);
    Matrix H(1, 1);
    if (data->second_order) {
      g(0) = 0.0;
      H(0, 0) = data->value[best];
    } else {
      g(0) = data->value[best];
      H(0, 0) = 0.0;
    }
    return DerivativeBundle{g, H, data->f[best]};
  };
  o.meta.f_low = 0.0;
  o.box_lower = Vector::Constant(1, 0.0);
  o.box_upper = Vector::Constant(1, seq.x.back());
  return o;
}

ReplayResult replay_sequence(const SlowSequence& seq) {
  if (seq.p > 2) throw std::invalid_argument("replay needs p <= 2");
  OffoConfig c;
  c.degree = seq.p;
  c.strict_mode = true;
  c.vartheta = 1.0;
  c.nu0 = seq.sigma0;
  // mu_1 and mu_2 are negative on these sequences for any theta >= 1, so sigma_k = nu_k.
  c.theta1 = 2.0;
  c.theta2 = 2.0;
  c.max_iter = static_cast<int>(seq.k_eps) + 10;
  ReplayResult res;
  if (seq.second_order) {
    c.eps1 = 1.0;
    c.eps2 = seq.eps;
    res.outcome = run_moffar(scripted_oracle(seq), c);
  } else {
    c.eps1 = seq.eps;
    res.outcome = run_offar(scripted_oracle(seq), c);
  }
  const RunStatus want = seq.second_order ? RunStatus::SecondOrderPoint : RunStatus::FirstOrderPoint;
  res.exact_count = res.outcome.status == want && res.outcome.iterations == seq.k_eps;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); };
  for (const auto& row : res.outcome.trace.rows) {
    const auto k = static_cast<std::size_t>(row.k);
    if (k >= seq.sigma.size()) break;
    if (row.sigma) res.max_sigma_rel_dev = std::max(res.max_sigma_rel_dev, rel(*row.sigma, seq.sigma[k]));
    if (row.nu) res.max_nu_rel_dev = std::max(res.max_nu_rel_dev, rel(*row.nu, seq.sigma[k]));
    if (row.step_norm) res.max_step_rel_dev = std::max(res.max_step_rel_dev, rel(*row.step_norm, seq.s[k]));
  }
  return res;
}

DivergenceRun run_divergence(double H, double theta1, int iters) {
  if (!(H >= 1.0) || !std::isfinite(H)) throw std::invalid_argument("H must be >= 1");
  if (!(theta1 >= 1.0)) throw std::invalid_argument("theta1 must be >= 1");
  if (iters < 1) throw std::invalid_argument("iters must be >= 1");

  DivergenceRun run;
  run.H = H;
  run.theta1 = theta1;
  run.iterations = iters;
  run.closed_form_sigma = 2.0 * (H + 1.0) / std::sqrt(1.0 + (H + 1.0) * (H + 1.0));
  run.kappa_f = (H + 1.0) * (H + 1.0);

  const Vector g = -Vector::Ones(2);
  Matrix Hm = Matrix::Zero(2, 2);
  Hm(1, 1) = H;
  Vector s(2);
  s << 1.0, 1.0 / (H + 1.0);
  const double snorm = s.norm();
  const double kf = run.kappa_f;

  // Per-coordinate Hermite data: f_j = 1/2, g_j = -1, H_11 = 0, H_22 = H, constant in k.
  const double s2 = s(1);
  const double t1 = 0.5 - 1.0;
  const double t2 = 0.5 - s2 + 0.5 * H * s2 * s2;
  require(std::abs(0.5 - t1) <= kf * 1.0, "coordinate 1 function condition", 0);
  require(std::abs(0.5 - t2) < kf * s2 * s2 * s2, "coordinate 2 function condition", 0);
  require(H * s2 < kf * s2 * s2, "coordinate 2 gradient condition", 0);

  Vector x = Vector::Zero(2);
  double sigma = run.closed_form_sigma;
  double nu = sigma;
  run.x.push_back(x);
  for (int k = 0; k < iters; ++k) {
    std::optional<double> mu1;
    if (k > 0) {
      mu1 = 2.0 * g.norm() / (snorm * snorm) - theta1 * sigma;
      require(*mu1 < sigma, "mu_1k < sigma_{k-1}", k);
      sigma = std::max(sigma, *mu1);
    }
    require(sigma == run.closed_form_sigma, "constant sigma", k);
    const double identity = sigma * snorm / 2.0;
    if (std::abs(identity - 1.0) > 1e-12) {
      throw ConstructionError("sigma ||s|| / 2 = 1 fails at k=" + std::to_string(k));
    }
    const StepResult exact = solve_p2(g, Hm, sigma);
    run.max_solver_deviation =
        std::max(run.max_solver_deviation, (exact.step - s).lpNorm<Eigen::Infinity>());
    run.sigma.push_back(sigma);
    run.mu1.push_back(mu1);
    run.nu.push_back(nu);
    run.grad_norm.push_back(g.norm());
    x += s;
    run.x.push_back(x);
    nu = nu_update(nu, snorm, 2);
  }
  return run;
}

}  // namespace offo
