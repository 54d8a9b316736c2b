#include "offo/theory_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace offo {

namespace {

long long checked_ceil(double x) {
  if (!std::isfinite(x)) throw std::overflow_error("iteration bound is not finite");
  return static_cast<long long>(std::ceil(x));
}

}  // namespace

BoundReport theory_bounds(const BoundInputs& in) {
  std::vector<std::string> absent;
  if (!in.lipschitz) absent.push_back("lipschitz");
  if (!in.sigma0) absent.push_back("sigma0");
  if (!absent.empty()) {
    std::string msg = "theory_bounds: missing";
    for (const auto& a : absent) msg += " " + a;
    throw std::invalid_argument(msg);
  }
  const int p = in.p;
  const double L = *in.lipschitz;
  const double s0 = *in.sigma0;
  const double th1 = in.theta1, th2 = in.theta2, vt = in.vartheta;
  if (p < 1) throw std::invalid_argument("theory_bounds: p must be >= 1");
  if (!(L >= 0.0)) throw std::invalid_argument("theory_bounds: lipschitz must be >= 0");
  if (!(s0 > 0.0)) throw std::invalid_argument("theory_bounds: sigma0 must be > 0");
  if (!(vt > 0.0 && vt <= 1.0)) throw std::invalid_argument("theory_bounds: vartheta in (0,1]");
  if (!(th1 > 0.0) || !(th2 > 0.0)) throw std::invalid_argument("theory_bounds: theta must be > 0");
  if (!(in.eps1 > 0.0)) throw std::invalid_argument("theory_bounds: eps1 must be > 0");
  if (in.eps2 && !(*in.eps2 > 0.0)) throw std::invalid_argument("theory_bounds: eps2 must be > 0");
  if (in.kappa_high && *in.kappa_high > 0.0) {
    throw std::invalid_argument("theory_bounds: kappa_high must be <= 0");
  }

  BoundReport r;
  r.p = p;
  const double pf = factorial(p);
  const double p1f = factorial(p + 1);
  const double q = static_cast<double>(p + 1) / p;
  const double ratio = L / s0;

  r.k_star_raw = std::pow(2.0 * L / (in.eps1 * vt * pf) * ((1.0 + th1) * ratio + th1), q);
  r.k_star = checked_ceil(r.k_star_raw);

  if (p == 1) {
    r.eta = 0.0;
  } else if (in.kappa_high) {
    const double kh = std::max(0.0, -*in.kappa_high);
    double eta = 0.0;
    for (int i = 2; i <= p; ++i) {
      eta += std::pow(kh * p1f / (factorial(i) * vt * s0), 1.0 / (p - i + 1));
    }
    r.eta = eta;
  } else {
    r.missing.push_back("kappa_high");
  }
  if (!in.g0_norm) r.missing.push_back("g0_norm");
  if (!in.f0) r.missing.push_back("f0");
  if (!in.f_low) r.missing.push_back("f_low");

  if (r.eta) {
    const double eta = *r.eta;
    const double c = std::pow(2.0, 2 * p + 1);
    r.kappa1 = 1.0 + c * std::pow(eta, p + 1) +
               c * std::pow((p + 1) / vt * ((1.0 + th1) * ratio + th1), q);
    if (in.g0_norm) {
      const double step = 2.0 * eta + 2.0 * std::pow(p1f * *in.g0_norm / s0, 1.0 / p);
      r.nu_max = std::max(s0 + s0 * std::pow(step, p + 1), 2.0 * *r.kappa1 * L / vt);
    }
  }
  std::optional<double> excess;  // f(x0) - f_low + (L nu_max / sigma0 + vartheta sigma0) / (p+1)!
  if (r.nu_max && in.f0) {
    const double extra = (ratio * *r.nu_max + vt * s0) / p1f;
    r.f_k1_bound = *in.f0 + extra;
    if (in.f_low) {
      excess = *in.f0 - *in.f_low + extra;
      r.sigma_max = std::max({2.0 * p1f / vt * *excess + *r.nu_max, L, s0});
    }
  }
  if (r.sigma_max) {
    r.kappa_offar = 2.0 * p1f * std::pow(*r.sigma_max, 1.0 / p) *
                    std::pow((ratio + vt * th1) / (vt * pf), q);
    r.first_order_bound =
        (*r.kappa_offar * *excess + std::pow(2.0 * L / (vt * pf) * (ratio + th1), q)) *
            std::pow(in.eps1, -q) +
        2.0;
  }

  if (p >= 2) {
    const double pm1f = factorial(p - 1);
    const double q2 = static_cast<double>(p + 1) / (p - 1);
    r.kappa_both = std::min(std::pow(pf / ((1.0 + th1) * ratio + th1), 1.0 / p),
                            std::pow(pm1f / ((1.0 + th2) * ratio + th2), 1.0 / (p - 1)));
    if (in.eps2) {
      const double big = 2.0 * L / vt;
      const double eps_factor = std::max(std::pow(in.eps1, -q), std::pow(*in.eps2, -q2));
      const double kss = 2.0 * L / (std::pow(*r.kappa_both, p + 1) * vt) *
                         std::max(std::pow(big, 1.0 / p), std::pow(big, 2.0 / (p - 1))) *
                         eps_factor;
      r.k_2star_raw = kss;
      r.k_2star = checked_ceil(kss);
      if (r.sigma_max) {
        r.kappa_moffar =
            2.0 * p1f *
            std::max(std::pow(*r.sigma_max, 1.0 / p) * std::pow((ratio + vt * th1) / (vt * pf), q),
                     std::pow(*r.sigma_max, 2.0 / (p - 1)) *
                         std::pow((ratio + vt * th2) / (vt * pm1f), q2));
        r.second_order_bound = *r.kappa_moffar * *excess * eps_factor + kss + 2.0;
      }
    } else {
      r.missing.push_back("eps2");
    }
  }
  return r;
}

BoundReport theory_bounds(const ProblemMeta& meta, const OffoConfig& config, double sigma0,
                          std::optional<double> g0_norm, std::optional<double> f0) {
  BoundInputs in;
  in.p = config.degree;
  in.lipschitz = meta.lipschitz_for(config.degree);
  in.sigma0 = sigma0;
  in.f_low = meta.f_low;
  in.kappa_high = meta.kappa_high;
  in.g0_norm = g0_norm;
  in.f0 = f0;
  in.theta1 = config.theta1;
  in.theta2 = config.theta2;
  in.vartheta = config.vartheta;
  in.eps1 = config.eps1;
  in.eps2 = config.eps2;
  return theory_bounds(in);
}

}  // namespace offo
