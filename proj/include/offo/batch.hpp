#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "offo/problems.hpp"
#include "offo/profile.hpp"
#include "offo/solvers.hpp"

namespace offo {

enum class Algorithm { Offar1, Offar2a, Offar2b, Moffar2, Ar2 };

std::string to_string(Algorithm a);
/// Accepts offar1, offar2a, offar2b, moffar2, ar2, and offar2 as a synonym for offar2a.
/// Throws std::invalid_argument otherwise.
Algorithm parse_algorithm(const std::string& name);

/// One (problem, algorithm, noise level, seed) combination.
struct RunSpec {
  std::string problem;
  Algorithm algorithm = Algorithm::Offar2a;
  double noise = 0.0;
  std::uint64_t seed = 1;
  double eps1 = 1e-6;
  /// Second-order tolerance for moffar2; eps1 when absent.
  std::optional<double> eps2;
  int max_iter = 50000;
  bool strict = false;
  std::optional<double> nu0;
};

/// Function-free solver settings for a spec: degree and beta from the variant, smoothing on
/// noisy runs unless strict mode is requested.
OffoConfig offo_config_for(const RunSpec& spec);
Ar2Config ar2_config_for(const RunSpec& spec);

/// Runs `spec` on `problem`, wrapping it with noise when spec.noise > 0.
RunOutcome execute(const RunSpec& spec, const ProblemOracle& problem,
                   const IterationObserver& observer = {});

struct RunRecord {
  RunSpec spec;
  RunStatus status = RunStatus::MaxIterations;
  int iterations = 0;
  int rejected_steps = 0;
  int certificate_failures = 0;
  double final_grad_norm = 0.0;
};

/// Looks the problem up in the suite and runs it.
RunRecord run_one(const RunSpec& spec);

/// Runs every spec in order on the calling thread.
std::vector<RunRecord> run_batch_serial(const std::vector<RunSpec>& specs);
/// Same result as run_batch_serial, with runs distributed over OpenMP threads. Each run
/// builds its own oracle and noise stream, and results are stored by spec index.
std::vector<RunRecord> run_batch_parallel(const std::vector<RunSpec>& specs);

struct BenchConfig {
  std::vector<std::string> problems;
  std::vector<Algorithm> algorithms;
  std::vector<double> levels;
  std::vector<std::uint64_t> seeds;
  /// Tolerance; 1e-6 on noiseless runs and 1e-3 on noisy ones when absent.
  std::optional<double> eps1;
  std::optional<double> eps2;
  int max_iter = 50000;
  bool parallel = true;
};

/// Expands a bench configuration into run specs. Noiseless runs are deterministic, so level
/// 0 is run once, with the first seed.
std::vector<RunSpec> expand(const BenchConfig& config);

struct BenchResult {
  std::vector<RunRecord> records;
  /// Mean over seeds of the percentage of solved problems, keyed by (algorithm, level).
  std::map<std::pair<std::string, double>, double> rho;
  /// Iteration-count profile of the noiseless runs, when level 0 was requested.
  std::optional<ProfileTable> profile;
};

BenchResult run_bench(const BenchConfig& config);

/// problem,algorithm,level,seed,status,iterations,rejected,certificate_failures,grad_norm
std::string records_to_csv(const std::vector<RunRecord>& records);
/// algorithm,level,rho[,pi]
std::string summary_to_csv(const BenchResult& result);

}  // namespace offo
