#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dna/io.hpp"

namespace dna {

namespace {

bool parse_number(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_index(std::string_view token, long long& value) {
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

struct Record {
  double label;
  std::vector<std::pair<Index, double>> entries;
};

}  // namespace

LibsvmDataset parse_libsvm(std::istream& in) {
  std::vector<Record> records;
  Index n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < view.size()) {
      while (pos < view.size() && std::isspace(static_cast<unsigned char>(view[pos]))) ++pos;
      std::size_t end = pos;
      while (end < view.size() && !std::isspace(static_cast<unsigned char>(view[end]))) ++end;
      if (end > pos) tokens.push_back(view.substr(pos, end - pos));
      pos = end;
    }
    if (tokens.empty()) continue;

    Record r;
    if (!parse_number(tokens[0], r.label) || !std::isfinite(r.label))
      throw ParseError(line_no, "bad label '" + std::string(tokens[0]) + "'");
    std::unordered_set<long long> seen;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      long long idx = 0;
      double val = 0;
      if (!parse_index(tok.substr(0, colon), idx)) throw ParseError(line_no, "bad index in '" + std::string(tok) + "'");
      if (idx <= 0) throw ParseError(line_no, "index must be positive, got " + std::to_string(idx));
      if (!seen.insert(idx).second) throw ParseError(line_no, "duplicate index " + std::to_string(idx));
      if (!parse_number(tok.substr(colon + 1), val)) throw ParseError(line_no, "bad value in '" + std::string(tok) + "'");
      r.entries.emplace_back(static_cast<Index>(idx - 1), val);
      n = std::max<Index>(n, static_cast<Index>(idx));
    }
    records.push_back(std::move(r));
  }
  if (in.bad()) throw std::runtime_error("parse_libsvm: read failure");

  LibsvmDataset ds;
  const auto m = static_cast<Index>(records.size());
  ds.features = Matrix::Zero(m, n);
  ds.labels.resize(m);
  for (Index i = 0; i < m; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    ds.labels(i) = r.label;
    for (const auto& [j, v] : r.entries) ds.features(i, j) = v;
  }
  return ds;
}

LibsvmDataset read_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_libsvm(in);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

void write_libsvm(std::ostream& out, const LibsvmDataset& ds) {
  if (ds.labels.size() != ds.features.rows()) throw ArgumentError("write_libsvm: labels and rows differ");
  for (Index i = 0; i < ds.features.rows(); ++i) {
    out << format_double(ds.labels(i));
    for (Index j = 0; j < ds.features.cols(); ++j) {
      const double v = ds.features(i, j);
      // -0.0 is written so that the round trip stays bit-exact.
      if (v == 0.0 && !std::signbit(v)) continue;
      out << ' ' << (j + 1) << ':' << format_double(v);
    }
    out << '\n';
  }
}

void write_libsvm(const std::string& path, const LibsvmDataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_libsvm(out, ds);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dna
