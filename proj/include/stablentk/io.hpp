#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "stablentk/linalg.hpp"
#include "stablentk/stable.hpp"

namespace stablentk {

/// Shortest round-trip decimal form ("%.17g"); used for every number written
/// to a result file so identical values give identical bytes.
std::string format_double(double v);

/// 64-bit FNV-1a hash, printed as 16 hex digits by digest_hex.
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::uint64_t h);

/// Delimited table: '#' comment lines, a header row of column names, then
/// comma-separated rows.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void write(std::ostream& os) const;
};

/// Text format for spectral measures:
///   # comment lines
///   dim <n>
///   <weight> <s_1> ... <s_n>      (one atom per line)
void write_spectral_measure(std::ostream& os, const DiscreteSpectralMeasure& gamma, const std::string& comment = "");
DiscreteSpectralMeasure read_spectral_measure(std::istream& is);

/// Same layout for matrices: "shape <rows> <cols>" then one row per line.
void write_matrix(std::ostream& os, const Matrix& m, const std::string& comment = "");
Matrix read_matrix(std::istream& is);

/// Self-contained SVG heatmap of a grid of values (row 0 drawn at the top),
/// with a diverging blue-white-red scale symmetric about zero.
void write_svg_heatmap(std::ostream& os, const Matrix& values, const std::string& title);

}  // namespace stablentk
