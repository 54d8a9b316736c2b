#include <atomic>
#include <memory>
#include <random>

#include "offo/problems.hpp"

namespace offo {

namespace {

// SplitMix64 as a UniformRandomBitGenerator, so std::normal_distribution can draw from a
// stream keyed by (seed, evaluation, channel).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t counter, std::uint64_t channel) {
  SplitMix64 a(seed);
  SplitMix64 b(a() ^ counter);
  SplitMix64 c(b() ^ (channel * 0xd1b54a32d192ed03ULL));
  return c();
}

}  // namespace

ProblemOracle add_noise(const ProblemOracle& oracle, const NoiseSpec& spec) {
  if (spec.level == 0.0) return oracle;
  ProblemOracle noisy = oracle;
  auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
  Evaluator inner = oracle.evaluate;
  noisy.evaluate = [inner, spec, counter](const Vector& x) {
    DerivativeBundle b = inner(x);
    const std::uint64_t k = counter->fetch_add(1);
    std::normal_distribution<double> z(0.0, 1.0);
    if (spec.function && b.fvalue) {
      SplitMix64 rng(mix(spec.seed, k, 0));
      *b.fvalue *= 1.0 + spec.level * z(rng);
    }
    if (spec.gradient) {
      SplitMix64 rng(mix(spec.seed, k, 1));
      z.reset();
      for (Eigen::Index i = 0; i < b.gradient.size(); ++i) {
        b.gradient(i) *= 1.0 + spec.level * z(rng);
      }
    }
    if (spec.hessian && b.hessian) {
      SplitMix64 rng(mix(spec.seed, k, 2));
      z.reset();
      Matrix& H = *b.hessian;
      for (Eigen::Index j = 0; j < H.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
          H(i, j) *= 1.0 + spec.level * z(rng);
          H(j, i) = H(i, j);
        }
      }
    }
    return b;
  };
  return noisy;
}

}  // namespace offo
