#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace offo {

/// One monitored iteration. Fields that do not apply to an algorithm, or to the terminal
/// row (no step taken), are empty.
struct TraceRow {
  int k = 0;
  double grad_norm = 0.0;
  std::optional<double> sigma;
  std::optional<double> nu;
  std::optional<double> mu1;
  std::optional<double> mu2;
  std::optional<double> step_norm;
  std::optional<double> model_reduction;
  std::optional<double> xi;
  std::optional<double> target;
  std::optional<double> delta;
  std::optional<double> tau;
  std::optional<double> fvalue;
  std::optional<double> lambda_min;
  std::optional<double> rho;
  std::optional<bool> accepted;
  std::optional<bool> certified;

  friend bool operator==(const TraceRow& a, const TraceRow& b);
};

struct RunTrace {
  std::string problem;
  std::string algorithm;
  std::uint64_t config_hash = 0;
  std::optional<std::uint64_t> seed;
  std::vector<TraceRow> rows;

  friend bool operator==(const RunTrace& a, const RunTrace& b) = default;
};

/// Writes `# key=value` metadata lines, a header row and one row per iteration.
/// Doubles use the shortest representation that round-trips.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
std::string trace_to_csv(const RunTrace& trace);

/// Inverse of write_trace_csv. Throws std::runtime_error on malformed input.
RunTrace read_trace_csv(std::istream& in);
RunTrace trace_from_csv(const std::string& text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);
double parse_double(const std::string& text);

}  // namespace offo
