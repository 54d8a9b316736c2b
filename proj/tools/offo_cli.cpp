#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "offo/batch.hpp"
#include "offo/problems.hpp"
#include "offo/theory_bounds.hpp"
#include "offo/trace.hpp"
#include "offo/worstcase.hpp"

namespace {

using namespace offo;

constexpr int kUsage = 1;

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::FirstOrderPoint:
    case RunStatus::SecondOrderPoint: return 0;
    case RunStatus::MaxIterations: return 2;
    case RunStatus::OracleOverflow: return 3;
  }
  return kUsage;
}

// "1..10", "1,3,5" or a mix such as "1..3,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoull(item));
      continue;
    }
    const auto lo = std::stoull(item.substr(0, dots));
    const auto hi = std::stoull(item.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("bad seed range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

void print_opt(const char* key, const std::optional<double>& v) {
  std::cout << key << '=' << (v ? format_double(*v) : std::string("n/a")) << '\n';
}

struct RunArgs {
  std::string problem;
  std::string alg = "offar2a";
  double eps1 = 1e-6;
  std::optional<double> eps2;
  double noise = 0.0;
  std::string seeds = "1";
  int max_iter = 50000;
  bool strict = false;
  std::optional<double> nu0;
  std::string trace_out;
};

int cmd_run(const RunArgs& a) {
  RunSpec spec;
  spec.problem = a.problem;
  spec.algorithm = parse_algorithm(a.alg);
  spec.eps1 = a.eps1;
  spec.eps2 = a.eps2;
  spec.noise = a.noise;
  spec.seed = parse_seeds(a.seeds).front();
  spec.max_iter = a.max_iter;
  spec.strict = a.strict;
  spec.nu0 = a.nu0;
  const ProblemOracle problem = find_problem(a.problem);
  const RunOutcome out = execute(spec, problem);
  std::cout << "problem=" << a.problem << " algorithm=" << to_string(spec.algorithm)
            << " status=" << to_string(out.status) << " iterations=" << out.iterations
            << " grad_norm=" << format_double(out.final_grad_norm);
  if (out.final_lambda_min) std::cout << " lambda_min=" << format_double(*out.final_lambda_min);
  if (spec.algorithm == Algorithm::Ar2) std::cout << " rejected=" << out.rejected_steps;
  std::cout << '\n';
  if (!a.trace_out.empty()) write_file(a.trace_out, trace_to_csv(out.trace));
  return exit_code(out.status);
}

struct BenchArgs {
  std::vector<std::string> problems;
  std::vector<std::string> algs{"ar2", "offar2a", "offar2b"};
  std::vector<double> noise{0.0};
  std::string seeds = "1";
  std::optional<double> eps1;
  std::optional<double> eps2;
  int max_iter = 50000;
  bool serial = false;
  std::string csv_out;
  std::string summary_out;
};

int cmd_bench(const BenchArgs& a) {
  BenchConfig c;
  c.problems = a.problems;
  for (const auto& p : c.problems) find_problem(p);
  for (const auto& s : a.algs) c.algorithms.push_back(parse_algorithm(s));
  c.levels = a.noise;
  c.seeds = parse_seeds(a.seeds);
  c.eps1 = a.eps1;
  c.eps2 = a.eps2;
  c.max_iter = a.max_iter;
  c.parallel = !a.serial;
  const BenchResult r = run_bench(c);
  const std::string summary = summary_to_csv(r);
  std::cout << summary;
  if (r.profile) {
    std::cout << "# noiseless iteration counts\nproblem";
    for (const auto& alg : r.profile->algorithms) std::cout << ',' << alg;
    std::cout << '\n';
    for (std::size_t p = 0; p < r.profile->problems.size(); ++p) {
      std::cout << r.profile->problems[p];
      for (double v : r.profile->costs[p]) std::cout << ',' << format_double(v);
      std::cout << '\n';
    }
  }
  if (!a.csv_out.empty()) write_file(a.csv_out, records_to_csv(r.records));
  if (!a.summary_out.empty()) write_file(a.summary_out, summary);
  return 0;
}

struct WorstArgs {
  std::string mode = "first";
  int p = 2;
  double eps = 0.25;
  std::optional<double> eps2;
  double sigma0 = 1.0;
  double H = 1.0;
  double theta1 = 1.0;
  int iters = 1000;
  std::string csv_out;
};

int cmd_worstcase(const WorstArgs& a) {
  if (a.mode == "diverge") {
    try {
      const DivergenceRun run = run_divergence(a.H, a.theta1, a.iters);
      std::cout << "iterations=" << run.iterations << " sigma=" << format_double(run.sigma.back())
                << " final_x1=" << format_double(run.x.back()(0))
                << " grad_norm=" << format_double(run.grad_norm.back())
                << " nu_final=" << format_double(run.nu.back())
                << " solver_deviation=" << format_double(run.max_solver_deviation) << '\n';
      const bool ok = run.max_solver_deviation <= 1e-10;
      std::cout << "checks=" << (ok ? "PASS" : "FAIL") << '\n';
      if (!a.csv_out.empty()) {
        std::ostringstream csv;
        csv << "k,x1,x2,sigma,mu1,nu\n";
        for (int k = 0; k < run.iterations; ++k) {
          csv << k << ',' << format_double(run.x[k](0)) << ',' << format_double(run.x[k](1))
              << ',' << format_double(run.sigma[k]) << ','
              << (run.mu1[k] ? format_double(*run.mu1[k]) : "") << ','
              << format_double(run.nu[k]) << '\n';
        }
        write_file(a.csv_out, csv.str());
      }
      return ok ? 0 : 4;
    } catch (const ConstructionError& e) {
      std::cout << "checks=FAIL (" << e.what() << ")\n";
      return 4;
    }
  }
  if (a.mode != "first" && a.mode != "second") {
    throw std::invalid_argument("--mode must be first, second or diverge");
  }
  const bool second = a.mode == "second";
  try {
    const SlowSequence seq = second ? gen_second_order(a.p, a.eps2.value_or(a.eps), a.sigma0)
                                    : gen_first_order(a.p, a.eps, a.sigma0);
    std::cout << "k_eps=" << seq.k_eps << " sigma_max_bound=" << format_double(seq.sigma_max_bound)
              << " f0=" << format_double(seq.f0) << '\n';
    bool ok = true;
    if (seq.p <= 2) {
      const ReplayResult rep = replay_sequence(seq);
      std::cout << "replay_iterations=" << rep.outcome.iterations
                << " replay_status=" << to_string(rep.outcome.status)
                << " sigma_dev=" << format_double(rep.max_sigma_rel_dev)
                << " step_dev=" << format_double(rep.max_step_rel_dev) << '\n';
      ok = rep.exact_count;
    }
    std::cout << "checks=" << (ok ? "PASS" : "FAIL") << '\n';
    if (!a.csv_out.empty()) write_file(a.csv_out, sequence_to_csv(seq));
    return ok ? 0 : 4;
  } catch (const ConstructionError& e) {
    std::cout << "checks=FAIL (" << e.what() << ")\n";
    return 4;
  }
}

struct BoundsArgs {
  std::string problem;
  std::optional<double> L, f_low, kappa_high, g0, f0, sigma0, eps2;
  int p = 2;
  double theta1 = 2.0;
  double theta2 = 2.0;
  double vartheta = 0.001;
  double eps1 = 1e-6;
};

int cmd_bounds(const BoundsArgs& a) {
  BoundInputs in;
  in.p = a.p;
  in.theta1 = a.theta1;
  in.theta2 = a.theta2;
  in.vartheta = a.vartheta;
  in.eps1 = a.eps1;
  in.eps2 = a.eps2;
  if (!a.problem.empty()) {
    const ProblemOracle prob = find_problem(a.problem);
    const DerivativeBundle b0 = prob.evaluate(prob.start);
    in.lipschitz = prob.meta.lipschitz_for(a.p);
    in.f_low = prob.meta.f_low;
    in.kappa_high = prob.meta.kappa_high;
    in.g0_norm = b0.gradient.norm();
    in.f0 = b0.fvalue;
    in.sigma0 = std::max(1e-6, 6.0 * b0.gradient.norm());
  }
  if (a.L) in.lipschitz = a.L;
  if (a.f_low) in.f_low = a.f_low;
  if (a.kappa_high) in.kappa_high = a.kappa_high;
  if (a.g0) in.g0_norm = a.g0;
  if (a.f0) in.f0 = a.f0;
  if (a.sigma0) in.sigma0 = a.sigma0;
  const BoundReport r = theory_bounds(in);
  std::cout << "k_star=" << r.k_star << '\n';
  std::cout << "k_star_raw=" << format_double(r.k_star_raw) << '\n';
  std::cout << "k_2star=" << (r.k_2star ? std::to_string(*r.k_2star) : std::string("n/a")) << '\n';
  print_opt("eta", r.eta);
  print_opt("kappa1", r.kappa1);
  print_opt("kappa_both", r.kappa_both);
  print_opt("nu_max", r.nu_max);
  print_opt("f_k1_bound", r.f_k1_bound);
  print_opt("sigma_max", r.sigma_max);
  print_opt("kappa_offar", r.kappa_offar);
  print_opt("kappa_moffar", r.kappa_moffar);
  print_opt("first_order_bound", r.first_order_bound);
  print_opt("second_order_bound", r.second_order_bound);
  if (!r.missing.empty()) {
    std::cout << "missing=";
    for (std::size_t i = 0; i < r.missing.size(); ++i) std::cout << (i ? "," : "") << r.missing[i];
    std::cout << '\n';
  }
  return 0;
}

int cmd_list() {
  std::cout << "name,dimension,f_low,L2\n";
  for (const auto& p : make_suite()) {
    const auto L2 = p.meta.lipschitz_for(2);
    std::cout << p.name << ',' << p.dimension << ','
              << (p.meta.f_low ? format_double(*p.meta.f_low) : "") << ','
              << (L2 ? format_double(*L2) : "") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Function-free adaptive regularization solvers and benchmarks"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "solve one suite problem");
  run_cmd->add_option("--problem", run.problem)->required();
  run_cmd->add_option("--alg", run.alg);
  run_cmd->add_option("--eps1", run.eps1);
  run_cmd->add_option("--eps2", run.eps2);
  run_cmd->add_option("--noise", run.noise);
  run_cmd->add_option("--seeds,--seed", run.seeds, "first seed is used");
  run_cmd->add_option("--max-iter", run.max_iter);
  run_cmd->add_flag("--strict", run.strict);
  run_cmd->add_option("--nu0", run.nu0);
  run_cmd->add_option("--trace-out", run.trace_out);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "run a problem x algorithm x noise x seed batch");
  bench_cmd->add_option("--problems", bench.problems)->delimiter(',');
  bench_cmd->add_option("--alg,--algs", bench.algs)->delimiter(',');
  bench_cmd->add_option("--noise", bench.noise)->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds);
  bench_cmd->add_option("--eps1", bench.eps1);
  bench_cmd->add_option("--eps2", bench.eps2);
  bench_cmd->add_option("--max-iter", bench.max_iter);
  bench_cmd->add_flag("--serial", bench.serial);
  bench_cmd->add_option("--csv-out", bench.csv_out);
  bench_cmd->add_option("--summary-out", bench.summary_out);

  WorstArgs worst;
  auto* worst_cmd = app.add_subcommand("worstcase", "generate and verify slow or divergent runs");
  worst_cmd->add_option("--mode", worst.mode);
  worst_cmd->add_option("--p", worst.p);
  worst_cmd->add_option("--eps", worst.eps);
  worst_cmd->add_option("--eps2", worst.eps2);
  worst_cmd->add_option("--sigma0", worst.sigma0);
  worst_cmd->add_option("--H", worst.H);
  worst_cmd->add_option("--theta1", worst.theta1);
  worst_cmd->add_option("--iters", worst.iters);
  worst_cmd->add_option("--csv-out", worst.csv_out);

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the worst-case iteration bounds");
  bounds_cmd->add_option("--problem", bounds.problem);
  bounds_cmd->add_option("--L", bounds.L);
  bounds_cmd->add_option("--f-low", bounds.f_low);
  bounds_cmd->add_option("--kappa-high", bounds.kappa_high);
  bounds_cmd->add_option("--g0", bounds.g0);
  bounds_cmd->add_option("--f0", bounds.f0);
  bounds_cmd->add_option("--sigma0", bounds.sigma0);
  bounds_cmd->add_option("--p", bounds.p);
  bounds_cmd->add_option("--theta1", bounds.theta1);
  bounds_cmd->add_option("--theta2", bounds.theta2);
  bounds_cmd->add_option("--vartheta", bounds.vartheta);
  bounds_cmd->add_option("--eps1", bounds.eps1);
  bounds_cmd->add_option("--eps2", bounds.eps2);

  auto* list_cmd = app.add_subcommand("list-problems", "list the test suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*bench_cmd) return cmd_bench(bench);
    if (*worst_cmd) return cmd_worstcase(worst);
    if (*bounds_cmd) return cmd_bounds(bounds);
    if (*list_cmd) return cmd_list();
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
