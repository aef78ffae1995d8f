#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dna/io.hpp"

namespace dna {
namespace {

LibsvmDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

std::string serialize(const LibsvmDataset& ds) {
  std::ostringstream out;
  write_libsvm(out, ds);
  return out.str();
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

TEST(Libsvm, ParsesSmallExample) {
  const auto ds = parse("1 1:1 3:2.5\n-1 2:4");
  Matrix expected(2, 3);
  expected << 1, 0, 2.5, 0, 4, 0;
  EXPECT_EQ(ds.features, expected);
  EXPECT_EQ(ds.labels, (Vector{{1.0, -1.0}}));
}

TEST(Libsvm, EmptyStream) {
  const auto ds = parse("");
  EXPECT_EQ(ds.samples(), 0);
  EXPECT_EQ(ds.dimension(), 0);
}

TEST(Libsvm, CommentsBlankLinesAndSigns) {
  const auto ds = parse("# header\n\n+1 2:-3e-2   4:+7 # trailing\n  \n-1\n0.5 1:1e300\n");
  ASSERT_EQ(ds.samples(), 3);
  EXPECT_EQ(ds.dimension(), 4);
  EXPECT_EQ(ds.labels, (Vector{{1.0, -1.0, 0.5}}));
  EXPECT_EQ(ds.features(0, 1), -3e-2);
  EXPECT_EQ(ds.features(0, 3), 7.0);
  EXPECT_TRUE(ds.features.row(1).isZero());
  EXPECT_EQ(ds.features(2, 0), 1e300);
}

TEST(Libsvm, ErrorsCarryLineNumbers) {
  const std::vector<std::pair<std::string, std::size_t>> bad{
      {"1 1:1\n1 0:2\n", 2},      {"1 1:1 1:2\n", 1},   {"# c\n\n1 -3:1\n", 3}, {"x 1:1\n", 1},
      {"1 1:abc\n", 1},           {"1 1-2\n", 1},       {"1 :2\n", 1},          {"1 1:\n", 1},
      {"1 1.5:2\n", 1},           {"1 1:2:3\n", 1},     {"inf 1:1\n", 1},       {"1 a:1\n", 1},
      {"1 99999999999999999999:1\n", 1}, {"1 1:1e999\n", 1}, {"1 1:0x10\n", 1}, {"+ 1:1\n", 1},
  };
  for (const auto& [text, line] : bad) {
    try {
      parse(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
      EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos);
    }
  }
}

TEST(Libsvm, RandomGarbageNeverEscapesAsOtherErrors) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "0123456789:+-.eE #\t\nabx";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(1, 40);
  int rejected = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    for (int i = len(rng); i > 0; --i) text += alphabet[pick(rng)];
    try {
      const auto ds = parse(text);
      EXPECT_TRUE(ds.labels.allFinite());
    } catch (const ParseError& e) {
      EXPECT_GE(e.line(), 1u);
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 1000);
}

TEST(Libsvm, RoundTripIsBitExact) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 3);
  LibsvmDataset ds;
  ds.features = Matrix::Zero(100, 30);
  ds.labels.resize(100);
  for (Index i = 0; i < 100; ++i) {
    ds.labels(i) = coin(rng) ? 1.0 : -1.0;
    for (Index j = 0; j < 30; ++j)
      if (coin(rng) == 0) ds.features(i, j) = normal(rng) * std::pow(10.0, coin(rng) * 50 - 75);
  }
  ds.features(99, 29) = 0.1;  // keep the dimension
  ds.features(3, 4) = -0.0;
  ds.features(5, 6) = 5e-324;
  ds.features(7, 8) = 1.7976931348623157e308;

  const std::string text = serialize(ds);
  const auto back = parse(text);
  EXPECT_TRUE(bit_equal(back.features, ds.features));
  EXPECT_TRUE(bit_equal(back.labels, ds.labels));
  EXPECT_EQ(serialize(back), text);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(2.0), "2.0");
  EXPECT_EQ(format_double(-0.0), "-0.0");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e20), "1e+20");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

ConvergenceTrace trace_of(std::size_t n) {
  ConvergenceTrace t;
  for (std::size_t i = 0; i < n; ++i) {
    TraceEvent e;
    e.grad_evals = static_cast<Index>(i);
    e.kind = i % 3 == 2 ? EventKind::Extrapolation : EventKind::GD;
    e.f_value = 1.0 / (1.0 + double(i)) + 0.25;
    e.f_gap = e.f_value - 0.25;
    e.fallback = i % 7 == 0;
    t.events.push_back(e);
  }
  t.f_star = 0.25;
  return t;
}

TEST(Trace, SingleEventLayout) {
  ConvergenceTrace t;
  TraceEvent e;
  e.grad_evals = 1;
  e.f_value = 2.0;
  e.f_gap = 1.0;
  t.events.push_back(e);
  std::ostringstream out;
  write_trace(out, t);
  EXPECT_EQ(out.str(), "grad_evals,event,f_value,f_gap,fallback\n1,gd,2.0,1.0,false\n");
}

TEST(Trace, RoundTripAndRowCount) {
  const auto t = trace_of(1000);
  std::ostringstream first;
  write_trace(first, t);
  std::istringstream in(first.str());
  const auto back = read_trace(in);
  std::ostringstream second;
  write_trace(second, back);
  EXPECT_EQ(first.str(), second.str());
  std::size_t rows = 0;
  for (char c : first.str()) rows += c == '\n';
  EXPECT_EQ(rows, 1001u);
  ASSERT_EQ(back.events.size(), 1000u);
  EXPECT_EQ(back.events[500].f_gap, t.events[500].f_gap);
  EXPECT_EQ(back.events[2].kind, EventKind::Extrapolation);
}

TEST(Trace, Errors) {
  EXPECT_THROW(write_trace(std::cout, ConvergenceTrace{}), ArgumentError);
  try {
    write_trace("/nonexistent-dir/t.csv", trace_of(2));
    ADD_FAILURE();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/t.csv"), std::string::npos);
  }
  std::istringstream wrong("a,b,c\n");
  EXPECT_THROW(read_trace(wrong), ParseError);
  std::istringstream bad_row("grad_evals,event,f_value,f_gap,fallback\n1,jump,1.0,1.0,false\n");
  EXPECT_THROW(read_trace(bad_row), ParseError);
}

TEST(Trace, ZeroGapRowsAreWritten) {
  auto t = trace_of(2);
  t.events[1].f_gap = 0.0;
  std::ostringstream out;
  write_trace(out, t);
  EXPECT_NE(out.str().find(",0.0,false\n"), std::string::npos);
}

TEST(Trace, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "dna_trace_test.csv").string();
  write_trace(path, trace_of(10));
  const auto back = read_trace_file(path);
  EXPECT_EQ(back.events.size(), 10u);
  std::filesystem::remove(path);
}

TEST(BundledData, SamplesParse) {
  for (const char* name : {"synthetic_ls.svm", "synthetic_logistic.svm", "sparse_mixed.svm"}) {
    const auto ds = read_libsvm(std::string(DNA_DATA_DIR) + "/" + name);
    EXPECT_GT(ds.samples(), 0) << name;
    EXPECT_GT(ds.dimension(), 0) << name;
  }
}

}  // namespace
}  // namespace dna
