#include "offo/batch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "offo/trace.hpp"

namespace offo {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Offar1: return "offar1";
    case Algorithm::Offar2a: return "offar2a";
    case Algorithm::Offar2b: return "offar2b";
    case Algorithm::Moffar2: return "moffar2";
    case Algorithm::Ar2: return "ar2";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "offar1") return Algorithm::Offar1;
  if (name == "offar2a" || name == "offar2") return Algorithm::Offar2a;
  if (name == "offar2b") return Algorithm::Offar2b;
  if (name == "moffar2") return Algorithm::Moffar2;
  if (name == "ar2") return Algorithm::Ar2;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

OffoConfig offo_config_for(const RunSpec& spec) {
  OffoConfig c;
  c.degree = spec.algorithm == Algorithm::Offar1 ? 1 : 2;
  c.beta = spec.algorithm == Algorithm::Offar2b ? 2.0 / 3.0 : 1.0;
  c.eps1 = spec.eps1;
  if (spec.algorithm == Algorithm::Moffar2) c.eps2 = spec.eps2.value_or(spec.eps1);
  c.max_iter = spec.max_iter;
  c.strict_mode = spec.strict;
  c.smoothing = spec.noise > 0.0 && !spec.strict;
  c.nu0 = spec.nu0;
  return c;
}

Ar2Config ar2_config_for(const RunSpec& spec) {
  Ar2Config c;
  c.eps1 = spec.eps1;
  c.max_iter = spec.max_iter;
  return c;
}

RunOutcome execute(const RunSpec& spec, const ProblemOracle& problem,
                   const IterationObserver& observer) {
  ProblemOracle oracle = problem;
  if (spec.noise > 0.0) {
    NoiseSpec ns;
    ns.level = spec.noise;
    ns.seed = spec.seed;
    oracle = add_noise(problem, ns);
  }
  RunOutcome out;
  switch (spec.algorithm) {
    case Algorithm::Ar2:
      out = run_ar2(oracle, ar2_config_for(spec), observer);
      break;
    case Algorithm::Moffar2:
      out = run_moffar(oracle, offo_config_for(spec), observer);
      break;
    default:
      out = run_offar(oracle, offo_config_for(spec), observer);
      break;
  }
  out.trace.algorithm = to_string(spec.algorithm);
  if (spec.noise > 0.0) out.trace.seed = spec.seed;
  return out;
}

RunRecord run_one(const RunSpec& spec) {
  const RunOutcome out = execute(spec, find_problem(spec.problem));
  RunRecord r;
  r.spec = spec;
  r.status = out.status;
  r.iterations = out.iterations;
  r.rejected_steps = out.rejected_steps;
  r.certificate_failures = out.certificate_failures;
  r.final_grad_norm = out.final_grad_norm;
  return r;
}

std::vector<RunRecord> run_batch_serial(const std::vector<RunSpec>& specs) {
  std::vector<RunRecord> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(run_one(s));
  return out;
}

std::vector<RunRecord> run_batch_parallel(const std::vector<RunSpec>& specs) {
  std::vector<RunRecord> out(specs.size());
  const auto n = static_cast<long long>(specs.size());
  // Exceptions must not escape an OpenMP region; the first one is rethrown afterwards.
  std::vector<std::exception_ptr> errors(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_one(specs[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<RunSpec> expand(const BenchConfig& config) {
  if (config.algorithms.empty()) throw std::invalid_argument("bench: no algorithms");
  if (config.levels.empty()) throw std::invalid_argument("bench: no noise levels");
  if (config.seeds.empty()) throw std::invalid_argument("bench: no seeds");
  const std::vector<std::string> problems =
      config.problems.empty() ? suite_names() : config.problems;
  std::vector<RunSpec> specs;
  for (double level : config.levels) {
    if (!(level >= 0.0)) throw std::invalid_argument("bench: noise level must be >= 0");
    const std::size_t nseeds = level == 0.0 ? 1 : config.seeds.size();
    for (Algorithm a : config.algorithms) {
      for (std::size_t si = 0; si < nseeds; ++si) {
        for (const auto& p : problems) {
          RunSpec s;
          s.problem = p;
          s.algorithm = a;
          s.noise = level;
          s.seed = config.seeds[si];
          s.eps1 = config.eps1.value_or(level == 0.0 ? 1e-6 : 1e-3);
          s.eps2 = config.eps2;
          s.max_iter = config.max_iter;
          specs.push_back(std::move(s));
        }
      }
    }
  }
  return specs;
}

BenchResult run_bench(const BenchConfig& config) {
  const std::vector<RunSpec> specs = expand(config);
  BenchResult res;
  res.records = config.parallel ? run_batch_parallel(specs) : run_batch_serial(specs);

  // rho: per (algorithm, level, seed) percentage solved, then the mean over seeds.
  std::map<std::pair<std::string, double>, std::map<std::uint64_t, std::pair<int, int>>> tally;
  for (const auto& r : res.records) {
    auto& cell = tally[{to_string(r.spec.algorithm), r.spec.noise}][r.spec.seed];
    cell.second += 1;
    if (succeeded(r.status)) cell.first += 1;
  }
  for (const auto& [key, per_seed] : tally) {
    double sum = 0.0;
    for (const auto& [seed, c] : per_seed) sum += 100.0 * c.first / c.second;
    res.rho[key] = sum / static_cast<double>(per_seed.size());
  }

  if (std::find(config.levels.begin(), config.levels.end(), 0.0) != config.levels.end()) {
    const std::vector<std::string> problems =
        config.problems.empty() ? suite_names() : config.problems;
    std::vector<std::string> algs;
    for (Algorithm a : config.algorithms) algs.push_back(to_string(a));
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> costs(problems.size(), std::vector<double>(algs.size(), inf));
    for (const auto& r : res.records) {
      if (r.spec.noise != 0.0 || !succeeded(r.status)) continue;
      const auto pi = static_cast<std::size_t>(
          std::find(problems.begin(), problems.end(), r.spec.problem) - problems.begin());
      const auto ai = static_cast<std::size_t>(
          std::find(algs.begin(), algs.end(), to_string(r.spec.algorithm)) - algs.begin());
      costs[pi][ai] = r.iterations;
    }
    res.profile = compute_profile(costs, problems, algs);
  }
  return res;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "problem,algorithm,level,seed,status,iterations,rejected,certificate_failures,grad_norm\n";
  for (const auto& r : records) {
    out << r.spec.problem << ',' << to_string(r.spec.algorithm) << ','
        << format_double(r.spec.noise) << ',' << r.spec.seed << ',' << to_string(r.status) << ','
        << r.iterations << ',' << r.rejected_steps << ',' << r.certificate_failures << ','
        << format_double(r.final_grad_norm) << '\n';
  }
  return out.str();
}

std::string summary_to_csv(const BenchResult& result) {
  std::ostringstream out;
  out << "algorithm,level,rho,pi\n";
  for (const auto& [key, rho] : result.rho) {
    out << key.first << ',' << format_double(key.second) << ',' << format_double(rho) << ',';
    if (key.second == 0.0 && result.profile) {
      const auto& algs = result.profile->algorithms;
      const auto it = std::find(algs.begin(), algs.end(), key.first);
      if (it != algs.end()) out << format_double(result.profile->pi[it - algs.begin()]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace offo
