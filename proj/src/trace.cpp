#include "offo/trace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace offo {

namespace {

bool same_double(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

bool same_opt(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_double(*a, *b);
}

constexpr const char* kColumns[] = {"k",      "grad_norm", "sigma",      "nu",
                                    "mu1",    "mu2",       "step_norm",  "model_reduction",
                                    "xi",     "target",    "delta",      "tau",
                                    "fvalue", "lambda_min", "rho",       "accepted",
                                    "certified"};
constexpr std::size_t kNumColumns = sizeof(kColumns) / sizeof(kColumns[0]);

std::optional<double> TraceRow::*const kDoubleFields[] = {
    &TraceRow::sigma,  &TraceRow::nu,    &TraceRow::mu1,        &TraceRow::mu2,
    &TraceRow::step_norm, &TraceRow::model_reduction, &TraceRow::xi, &TraceRow::target,
    &TraceRow::delta,  &TraceRow::tau,   &TraceRow::fvalue,     &TraceRow::lambda_min,
    &TraceRow::rho};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<bool> parse_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::runtime_error("trace csv: bad flag '" + s + "'");
}

}  // namespace

bool operator==(const TraceRow& a, const TraceRow& b) {
  if (a.k != b.k || !same_double(a.grad_norm, b.grad_norm)) return false;
  for (auto field : kDoubleFields) {
    if (!same_opt(a.*field, b.*field)) return false;
  }
  return a.accepted == b.accepted && a.certified == b.certified;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("cannot parse number '" + text + "'");
  }
  return v;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "# problem=" << trace.problem << '\n';
  out << "# algorithm=" << trace.algorithm << '\n';
  out << "# config_hash=" << std::hex << trace.config_hash << std::dec << '\n';
  if (trace.seed) out << "# seed=" << *trace.seed << '\n';
  for (std::size_t i = 0; i < kNumColumns; ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const TraceRow& r : trace.rows) {
    out << r.k << ',' << format_double(r.grad_norm);
    for (auto field : kDoubleFields) {
      out << ',';
      if ((r.*field)) out << format_double(*(r.*field));
    }
    out << ',';
    if (r.accepted) out << (*r.accepted ? '1' : '0');
    out << ',';
    if (r.certified) out << (*r.certified ? '1' : '0');
    out << '\n';
  }
}

std::string trace_to_csv(const RunTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

RunTrace read_trace_csv(std::istream& in) {
  RunTrace t;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "problem") {
        t.problem = value;
      } else if (key == "algorithm") {
        t.algorithm = value;
      } else if (key == "config_hash") {
        t.config_hash = std::stoull(value, nullptr, 16);
      } else if (key == "seed") {
        t.seed = std::stoull(value);
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (!header_seen) {
      if (cells.size() != kNumColumns || cells[0] != "k") {
        throw std::runtime_error("trace csv: unexpected header");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != kNumColumns) throw std::runtime_error("trace csv: wrong column count");
    TraceRow r;
    r.k = std::stoi(cells[0]);
    r.grad_norm = parse_double(cells[1]);
    std::size_t c = 2;
    for (auto field : kDoubleFields) {
      if (!cells[c].empty()) r.*field = parse_double(cells[c]);
      ++c;
    }
    r.accepted = parse_flag(cells[c++]);
    r.certified = parse_flag(cells[c++]);
    t.rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("trace csv: missing header");
  return t;
}

RunTrace trace_from_csv(const std::string& text) {
  std::istringstream is(text);
  return read_trace_csv(is);
}

}  // namespace offo
