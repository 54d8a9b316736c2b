#include "offo/problems.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace offo {

namespace {

using Index = Eigen::Index;

// Sparse first and second derivatives of a scalar term; at most four entries each.
template <typename Entry>
class Sparse {
 public:
  Sparse() = default;
  Sparse(std::initializer_list<Entry> entries) {
    for (const Entry& e : entries) push(e);
  }
  void push(const Entry& e) {
    if (size_ == entries_.size()) throw std::logic_error("sparse term capacity exceeded");
    entries_[size_++] = e;
  }
  const Entry* begin() const { return entries_.data(); }
  const Entry* end() const { return entries_.data() + size_; }

 private:
  std::array<Entry, 4> entries_{};
  std::size_t size_ = 0;
};

struct GradEntry {
  Index i;
  double v;
};
struct HessEntry {
  Index i;
  Index j;
  double v;
};
using Grad = Sparse<GradEntry>;
using Hess = Sparse<HessEntry>;

// Accumulates f, g and H over terms phi(r(x)).
class Accumulator {
 public:
  explicit Accumulator(Index n) : g_(Vector::Zero(n)), H_(Matrix::Zero(n, n)) {}

  void raw(double value, const Grad& grad = {}, const Hess& hess = {}) {
    f_ += value;
    for (const auto& e : grad) g_(e.i) += e.v;
    add_hess(hess, 1.0);
  }

  void compose(double phi, double dphi, double ddphi, const Grad& dr, const Hess& d2r) {
    f_ += phi;
    for (const auto& a : dr) {
      g_(a.i) += dphi * a.v;
      for (const auto& b : dr) H_(a.i, b.i) += ddphi * a.v * b.v;
    }
    add_hess(d2r, dphi);
  }

  // w r^2
  void square(double w, double r, const Grad& dr, const Hess& d2r = {}) {
    compose(w * r * r, 2.0 * w * r, 2.0 * w, dr, d2r);
  }

  // w r^4
  void quartic(double w, double r, const Grad& dr, const Hess& d2r = {}) {
    const double r2 = r * r;
    compose(w * r2 * r2, 4.0 * w * r2 * r, 12.0 * w * r2, dr, d2r);
  }

  DerivativeBundle finish() const { return DerivativeBundle{g_, H_, f_}; }

 private:
  void add_hess(const Hess& hess, double scale) {
    for (const auto& e : hess) {
      H_(e.i, e.j) += scale * e.v;
      if (e.i != e.j) H_(e.j, e.i) += scale * e.v;
    }
  }

  double f_ = 0.0;
  Vector g_;
  Matrix H_;
};

ProblemOracle make_problem(std::string name, Vector start, Evaluator eval, ProblemMeta meta,
                           Vector lower, Vector upper) {
  ProblemOracle p;
  p.name = std::move(name);
  p.dimension = start.size();
  p.start = std::move(start);
  p.evaluate = std::move(eval);
  p.meta = std::move(meta);
  p.box_lower = std::move(lower);
  p.box_upper = std::move(upper);
  return p;
}

// Box start +/- max(1, |start_i|) unless a problem needs something tighter.
void default_box(const Vector& start, Vector& lower, Vector& upper) {
  const Vector radius = start.cwiseAbs().cwiseMax(1.0);
  lower = start - radius;
  upper = start + radius;
}

ProblemMeta bounded_below(double f_low) {
  ProblemMeta m;
  m.f_low = f_low;
  return m;
}

ProblemMeta with_minimum(double f_low, Vector xstar) {
  ProblemMeta m = bounded_below(f_low);
  m.minimizer = std::move(xstar);
  m.minimum = f_low;
  return m;
}

ProblemOracle rosenbr(Index n) {
  Vector x0(n);
  for (Index i = 0; i < n; ++i) x0(i) = (i % 2 == 0) ? -1.2 : 1.0;
  auto eval = [n](const Vector& x) {
    Accumulator a(n);
    for (Index i = 0; i + 1 < n; ++i) {
      a.square(1.0, 10.0 * (x(i + 1) - x(i) * x(i)), {{i, -20.0 * x(i)}, {i + 1, 10.0}},
               {{i, i, -20.0}});
      a.square(1.0, 1.0 - x(i), {{i, -1.0}});
    }
    return a.finish();
  };
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("rosenbr", x0, eval, with_minimum(0.0, Vector::Ones(n)), lo, hi);
}

ProblemOracle cube() {
  Vector x0(2);
  x0 << -1.2, 1.0;
  auto eval = [](const Vector& x) {
    Accumulator a(2);
    a.square(1.0, x(0) - 1.0, {{0, 1.0}});
    a.square(1.0, 10.0 * (x(1) - x(0) * x(0) * x(0)), {{0, -30.0 * x(0) * x(0)}, {1, 10.0}},
             {{0, 0, -60.0 * x(0)}});
    return a.finish();
  };
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("cube", x0, eval, with_minimum(0.0, Vector::Ones(2)), lo, hi);
}

ProblemOracle beale() {
  Vector x0(2);
  x0 << 1.0, 1.0;
  auto eval = [](const Vector& x) {
    static constexpr double c[3] = {1.5, 2.25, 2.625};
    Accumulator a(2);
    for (int i = 1; i <= 3; ++i) {
      const double pw = std::pow(x(1), i);
      const double dpw = i * std::pow(x(1), i - 1);
      const double ddpw = i >= 2 ? i * (i - 1) * std::pow(x(1), i - 2) : 0.0;
      a.square(1.0, c[i - 1] - x(0) * (1.0 - pw), {{0, -(1.0 - pw)}, {1, x(0) * dpw}},
               {{0, 1, dpw}, {1, 1, x(0) * ddpw}});
    }
    return a.finish();
  };
  Vector xstar(2);
  xstar << 3.0, 0.5;
  Vector lo(2), hi(2);
  lo << -1.0, -1.0;
  hi << 3.5, 1.5;
  return make_problem("beale", x0, eval, with_minimum(0.0, xstar), lo, hi);
}

ProblemOracle powellsg(Index n) {
  if (n % 4 != 0) throw std::invalid_argument("powellsg dimension must be a multiple of 4");
  Vector x0(n);
  for (Index i = 0; i < n; i += 4) x0.segment<4>(i) << 3.0, -1.0, 0.0, 1.0;
  auto eval = [n](const Vector& x) {
    Accumulator a(n);
    for (Index j = 0; j < n; j += 4) {
      const Index p = j, q = j + 1, r = j + 2, s = j + 3;
      a.square(1.0, x(p) + 10.0 * x(q), {{p, 1.0}, {q, 10.0}});
      a.square(5.0, x(r) - x(s), {{r, 1.0}, {s, -1.0}});
      a.quartic(1.0, x(q) - 2.0 * x(r), {{q, 1.0}, {r, -2.0}});
      a.quartic(10.0, x(p) - x(s), {{p, 1.0}, {s, -1.0}});
    }
    return a.finish();
  };
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("powellsg", x0, eval, with_minimum(0.0, Vector::Zero(n)), lo, hi);
}

ProblemOracle broyden3d(Index n) {
  const Vector x0 = Vector::Constant(n, -1.0);
  auto eval = [n](const Vector& x) {
    Accumulator a(n);
    for (Index i = 0; i < n; ++i) {
      const double left = i > 0 ? x(i - 1) : 0.0;
      const double right = i + 1 < n ? x(i + 1) : 0.0;
      Grad dr{{i, 3.0 - 4.0 * x(i)}};
      if (i > 0) dr.push({i - 1, -1.0});
      if (i + 1 < n) dr.push({i + 1, -2.0});
      a.square(1.0, (3.0 - 2.0 * x(i)) * x(i) - left - 2.0 * right + 1.0, dr, {{i, i, -4.0}});
    }
    return a.finish();
  };
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("broyden3d", x0, eval, bounded_below(0.0), lo, hi);
}

ProblemOracle tridia(Index n) {
  constexpr double alpha = 2.0, beta = 1.0, gamma = 1.0, delta = 1.0;
  const Vector x0 = Vector::Ones(n);
  auto eval = [n](const Vector& x) {
    Accumulator a(n);
    a.square(gamma, delta * x(0) - 1.0, {{0, delta}});
    for (Index i = 1; i < n; ++i) {
      a.square(static_cast<double>(i + 1), alpha * x(i) - beta * x(i - 1),
               {{i, alpha}, {i - 1, -beta}});
    }
    return a.finish();
  };
  // The minimizer solves the triangular system x_1 = 1/delta, x_i = beta x_{i-1} / alpha.
  Vector xstar(n);
  xstar(0) = 1.0 / delta;
  for (Index i = 1; i < n; ++i) xstar(i) = beta * xstar(i - 1) / alpha;
  ProblemMeta meta = with_minimum(0.0, xstar);
  meta.lipschitz[2] = 0.0;
  meta.kappa_high = 0.0;
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("tridia", x0, eval, meta, lo, hi);
}

ProblemOracle arwhead(Index n) {
  const Vector x0 = Vector::Ones(n);
  auto eval = [n](const Vector& x) {
    Accumulator a(n);
    const Index last = n - 1;
    for (Index i = 0; i < last; ++i) {
      const double q = x(i) * x(i) + x(last) * x(last);
      a.compose(q * q, 2.0 * q, 2.0, {{i, 2.0 * x(i)}, {last, 2.0 * x(last)}},
                {{i, i, 2.0}, {last, last, 2.0}});
      a.raw(-4.0 * x(i) + 3.0, {{i, -4.0}});
    }
    return a.finish();
  };
  Vector xstar = Vector::Ones(n);
  xstar(n - 1) = 0.0;
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("arwhead", x0, eval, with_minimum(0.0, xstar), lo, hi);
}

ProblemOracle engval1(Index n) {
  const Vector x0 = Vector::Constant(n, 2.0);
  auto eval = [n](const Vector& x) {
    Accumulator a(n);
    for (Index i = 0; i + 1 < n; ++i) {
      const double q = x(i) * x(i) + x(i + 1) * x(i + 1);
      a.compose(q * q, 2.0 * q, 2.0, {{i, 2.0 * x(i)}, {i + 1, 2.0 * x(i + 1)}},
                {{i, i, 2.0}, {i + 1, i + 1, 2.0}});
      a.raw(-4.0 * x(i) + 3.0, {{i, -4.0}});
    }
    return a.finish();
  };
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("engval1", x0, eval, bounded_below(0.0), lo, hi);
}

ProblemOracle dixmaana(Index n) {
  if (n % 3 != 0) throw std::invalid_argument("dixmaana dimension must be a multiple of 3");
  constexpr double gamma = 0.125, delta = 0.125;
  const Index m = n / 3;
  const Vector x0 = Vector::Constant(n, 2.0);
  auto eval = [n, m](const Vector& x) {
    Accumulator a(n);
    a.raw(1.0);
    for (Index i = 0; i < n; ++i) a.square(1.0, x(i), {{i, 1.0}});
    for (Index i = 0; i < 2 * m; ++i) {
      const Index j = i + m;
      const double xi = x(i), xj = x(j);
      const double xj2 = xj * xj, xj3 = xj2 * xj, xj4 = xj2 * xj2;
      a.raw(gamma * xi * xi * xj4, {{i, 2.0 * gamma * xi * xj4}, {j, 4.0 * gamma * xi * xi * xj3}},
            {{i, i, 2.0 * gamma * xj4}, {i, j, 8.0 * gamma * xi * xj3},
             {j, j, 12.0 * gamma * xi * xi * xj2}});
    }
    for (Index i = 0; i < m; ++i) {
      const Index j = i + 2 * m;
      a.raw(delta * x(i) * x(j), {{i, delta * x(j)}, {j, delta * x(i)}}, {{i, j, delta}});
    }
    return a.finish();
  };
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("dixmaana", x0, eval, with_minimum(1.0, Vector::Zero(n)), lo, hi);
}

ProblemOracle nondquar(Index n) {
  Vector x0(n);
  for (Index i = 0; i < n; ++i) x0(i) = (i % 2 == 0) ? 1.0 : -1.0;
  auto eval = [n](const Vector& x) {
    Accumulator a(n);
    const Index last = n - 1;
    a.square(1.0, x(0) - x(1), {{0, 1.0}, {1, -1.0}});
    a.square(1.0, x(n - 2) - x(last), {{n - 2, 1.0}, {last, -1.0}});
    for (Index i = 0; i + 2 < n; ++i) {
      a.quartic(1.0, x(i) + x(i + 1) + x(last), {{i, 1.0}, {i + 1, 1.0}, {last, 1.0}});
    }
    return a.finish();
  };
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("nondquar", x0, eval, with_minimum(0.0, Vector::Zero(n)), lo, hi);
}

ProblemOracle woods(Index n) {
  if (n % 4 != 0) throw std::invalid_argument("woods dimension must be a multiple of 4");
  Vector x0(n);
  for (Index i = 0; i < n; i += 4) x0.segment<4>(i) << -3.0, -1.0, -3.0, -1.0;
  auto eval = [n](const Vector& x) {
    const double r90 = std::sqrt(90.0);
    Accumulator a(n);
    for (Index j = 0; j < n; j += 4) {
      const Index p = j, q = j + 1, r = j + 2, s = j + 3;
      a.square(1.0, 10.0 * (x(q) - x(p) * x(p)), {{p, -20.0 * x(p)}, {q, 10.0}}, {{p, p, -20.0}});
      a.square(1.0, 1.0 - x(p), {{p, -1.0}});
      a.square(1.0, r90 * (x(s) - x(r) * x(r)), {{r, -2.0 * r90 * x(r)}, {s, r90}},
               {{r, r, -2.0 * r90}});
      a.square(1.0, 1.0 - x(r), {{r, -1.0}});
      a.square(10.1, x(q) - 1.0, {{q, 1.0}});
      a.square(10.1, x(s) - 1.0, {{s, 1.0}});
      a.raw(19.8 * (x(q) - 1.0) * (x(s) - 1.0), {{q, 19.8 * (x(s) - 1.0)}, {s, 19.8 * (x(q) - 1.0)}},
            {{q, s, 19.8}});
    }
    return a.finish();
  };
  Vector lo, hi;
  default_box(x0, lo, hi);
  return make_problem("woods", x0, eval, with_minimum(0.0, Vector::Ones(n)), lo, hi);
}

ProblemOracle helix() {
  Vector x0(3);
  x0 << -1.0, 0.0, 0.0;
  auto eval = [](const Vector& x) {
    constexpr double pi = std::numbers::pi;
    const double x1 = x(0), x2 = x(1), x3 = x(2);
    const double r2 = x1 * x1 + x2 * x2;
    const double r = std::sqrt(r2);
    const double r4 = r2 * r2;
    double theta = std::atan(x2 / x1) / (2.0 * pi);
    if (x1 < 0.0) theta += 0.5;
    const double t1 = -x2 / (2.0 * pi * r2);
    const double t2 = x1 / (2.0 * pi * r2);
    const double t11 = x1 * x2 / (pi * r4);
    const double t22 = -t11;
    const double t12 = (x2 * x2 - x1 * x1) / (2.0 * pi * r4);
    Accumulator a(3);
    a.square(1.0, 10.0 * (x3 - 10.0 * theta), {{0, -100.0 * t1}, {1, -100.0 * t2}, {2, 10.0}},
             {{0, 0, -100.0 * t11}, {0, 1, -100.0 * t12}, {1, 1, -100.0 * t22}});
    const double r3 = r2 * r;
    a.square(1.0, 10.0 * (r - 1.0), {{0, 10.0 * x1 / r}, {1, 10.0 * x2 / r}},
             {{0, 0, 10.0 * x2 * x2 / r3}, {0, 1, -10.0 * x1 * x2 / r3}, {1, 1, 10.0 * x1 * x1 / r3}});
    a.square(1.0, x3, {{2, 1.0}});
    return a.finish();
  };
  Vector xstar(3);
  xstar << 1.0, 0.0, 0.0;
  // Keep x1 < 0 so the angle stays on one continuous branch.
  Vector lo(3), hi(3);
  lo << -2.0, -1.0, -1.0;
  hi << -0.5, 1.0, 1.0;
  return make_problem("helix", x0, eval, with_minimum(0.0, xstar), lo, hi);
}

}  // namespace

std::vector<ProblemOracle> make_suite() {
  return {rosenbr(10), cube(),         beale(),        powellsg(12),
          broyden3d(10), tridia(10),   arwhead(10),    engval1(10),
          dixmaana(12),  nondquar(10), woods(12),      helix()};
}

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& p : make_suite()) names.push_back(p.name);
  return names;
}

ProblemOracle find_problem(const std::string& name) {
  for (auto& p : make_suite()) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("unknown problem '" + name + "'");
}

ProblemOracle make_diagonal_quadratic(const Vector& diag, const Vector& start) {
  if (diag.size() != start.size()) throw std::invalid_argument("diagonal/start size mismatch");
  auto eval = [diag](const Vector& x) {
    const Vector g = diag.cwiseProduct(x);
    return DerivativeBundle{g, Matrix(diag.asDiagonal()), 0.5 * x.dot(g)};
  };
  ProblemMeta meta;
  meta.lipschitz[1] = diag.cwiseAbs().maxCoeff();
  meta.lipschitz[2] = 0.0;
  meta.kappa_high = std::min(0.0, diag.minCoeff());
  if (diag.minCoeff() >= 0.0) {
    meta.f_low = 0.0;
    meta.minimum = 0.0;
    meta.minimizer = Vector::Zero(diag.size());
  }
  Vector lo, hi;
  default_box(start, lo, hi);
  return make_problem("diagquad", start, eval, meta, lo, hi);
}

ProblemOracle make_sine_bowl(Eigen::Index n, double amplitude, const Vector& start) {
  if (start.size() != n) throw std::invalid_argument("sine bowl start size mismatch");
  auto eval = [amplitude](const Vector& x) {
    const Vector s = x.array().sin().matrix();
    const Vector c = x.array().cos().matrix();
    const Vector g = x + amplitude * c;
    Matrix H = Matrix::Identity(x.size(), x.size());
    H.diagonal() -= amplitude * s;
    return DerivativeBundle{g, H, 0.5 * x.squaredNorm() + amplitude * s.sum()};
  };
  ProblemMeta meta;
  meta.lipschitz[1] = 1.0 + std::abs(amplitude);
  meta.lipschitz[2] = std::abs(amplitude);
  meta.kappa_high = std::min(0.0, 1.0 - std::abs(amplitude));
  meta.f_low = -std::abs(amplitude) * static_cast<double>(n);
  Vector lo, hi;
  default_box(start, lo, hi);
  return make_problem("sinebowl", start, eval, meta, lo, hi);
}

std::vector<Vector> sample_box(const ProblemOracle& oracle, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> pts;
  pts.reserve(count);
  for (int c = 0; c < count; ++c) {
    Vector x(oracle.dimension);
    for (Index i = 0; i < oracle.dimension; ++i) {
      x(i) = oracle.box_lower(i) + u(rng) * (oracle.box_upper(i) - oracle.box_lower(i));
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

DerivativeReport validate_derivatives(const ProblemOracle& oracle,
                                      const std::vector<Vector>& points) {
  constexpr double kGradTol = 1e-5;
  constexpr double kHessTol = 1e-4;
  DerivativeReport rep;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Vector& x = points[pi];
    const DerivativeBundle b = oracle.evaluate(x);
    if (!b.fvalue) throw std::invalid_argument("validate_derivatives needs function values");
    const double h = 1e-6 * std::max(1.0, x.norm());
    const Index n = x.size();
    for (Index i = 0; i < n; ++i) {
      Vector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const DerivativeBundle bp = oracle.evaluate(xp);
      const DerivativeBundle bm = oracle.evaluate(xm);
      const double fd = (*bp.fvalue - *bm.fvalue) / (2.0 * h);
      const double err = std::abs(fd - b.gradient(i)) / std::max(1.0, std::abs(b.gradient(i)));
      rep.max_gradient_error = std::max(rep.max_gradient_error, err);
      if (!(err <= kGradTol)) {
        rep.violations.push_back(
            {pi, DerivativeViolation::Kind::Gradient, i, 0, b.gradient(i), fd, err});
      }
      if (b.hessian) {
        const Vector col = (bp.gradient - bm.gradient) / (2.0 * h);
        for (Index r = 0; r < n; ++r) {
          const double exact = (*b.hessian)(r, i);
          const double e = std::abs(col(r) - exact) / std::max(1.0, std::abs(exact));
          rep.max_hessian_error = std::max(rep.max_hessian_error, e);
          if (!(e <= kHessTol)) {
            rep.violations.push_back({pi, DerivativeViolation::Kind::Hessian, r, i, exact, col(r), e});
          }
        }
      }
    }
  }
  rep.passed = rep.violations.empty();
  return rep;
}

}  // namespace offo
