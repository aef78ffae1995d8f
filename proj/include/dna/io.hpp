#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "dna/errors.hpp"
#include "dna/schemes.hpp"
#include "dna/types.hpp"

namespace dna {

/// Dense copy of a LIBSVM file: rows are samples, n is the largest index seen.
struct LibsvmDataset {
  Matrix features;
  Vector labels;

  Index samples() const { return features.rows(); }
  Index dimension() const { return features.cols(); }
};

/// `label idx:val idx:val ...` per line; '#' starts a comment. Values are
/// kept as written, no scaling.
LibsvmDataset parse_libsvm(std::istream& in);
LibsvmDataset read_libsvm(const std::string& path);

/// Shortest round-trip decimals, zero entries omitted. Bit-exact under parse.
void write_libsvm(std::ostream& out, const LibsvmDataset& ds);
void write_libsvm(const std::string& path, const LibsvmDataset& ds);

/// Shortest decimal that reads back to the same double, with ".0" appended
/// to integral values ("2.0", "1e+20", "inf", "nan").
std::string format_double(double v);

inline constexpr std::string_view kTraceHeader = "grad_evals,event,f_value,f_gap,fallback";

/// One row per event under kTraceHeader. Throws std::runtime_error naming
/// the path when the file cannot be written.
void write_trace(std::ostream& out, const ConvergenceTrace& trace);
void write_trace(const std::string& path, const ConvergenceTrace& trace);

/// Inverse of write_trace. Points are not stored in the CSV and come back empty.
ConvergenceTrace read_trace(std::istream& in);
ConvergenceTrace read_trace_file(const std::string& path);

}  // namespace dna
