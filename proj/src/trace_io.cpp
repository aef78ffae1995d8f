#include <charconv>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dna/io.hpp"

namespace dna {

void write_trace(std::ostream& out, const ConvergenceTrace& trace) {
  if (trace.events.empty()) throw ArgumentError("write_trace: trace is empty");
  out << kTraceHeader << '\n';
  for (const auto& e : trace.events)
    out << e.grad_evals << ',' << to_string(e.kind) << ',' << format_double(e.f_value) << ','
        << format_double(e.f_gap) << ',' << (e.fallback ? "true" : "false") << '\n';
}

void write_trace(const std::string& path, const ConvergenceTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace to " + path);
  write_trace(out, trace);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

double parse_field(const std::string& s, std::size_t line) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line, "bad number '" + s + "'");
  return v;
}

}  // namespace

ConvergenceTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw ParseError(1, "missing trace header");
  ConvergenceTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 fields");

    TraceEvent e;
    const auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), e.grad_evals);
    if (ec != std::errc() || ptr != fields[0].data() + fields[0].size())
      throw ParseError(line_no, "bad grad_evals '" + fields[0] + "'");
    const auto kind = parse_event_kind(fields[1]);
    if (!kind) throw ParseError(line_no, "bad event '" + fields[1] + "'");
    e.kind = *kind;
    e.f_value = parse_field(fields[2], line_no);
    e.f_gap = parse_field(fields[3], line_no);
    if (fields[4] != "true" && fields[4] != "false") throw ParseError(line_no, "bad fallback '" + fields[4] + "'");
    e.fallback = fields[4] == "true";
    trace.events.push_back(std::move(e));
  }
  if (!trace.events.empty()) trace.f_star = trace.events.front().f_value - trace.events.front().f_gap;
  return trace;
}

ConvergenceTrace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace(in);
}

}  // namespace dna
