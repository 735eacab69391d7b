#include "stablentk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace stablentk {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("Table: row has " + std::to_string(row.size()) + " cells, expected " +
                                std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

void Table::write(std::ostream& os) const {
  for (const auto& c : comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
}

namespace {

// Next line that is neither blank nor a comment; false at end of input.
bool next_data_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

std::vector<double> parse_numbers(const std::string& line) {
  std::istringstream ss(line);
  std::vector<double> v;
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    double x;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + tok + "'");
    }
    if (used != tok.size()) throw std::invalid_argument("not a number: '" + tok + "'");
    v.push_back(x);
  }
  return v;
}

}  // namespace

void write_spectral_measure(std::ostream& os, const DiscreteSpectralMeasure& gamma, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "# weight followed by direction components, one atom per line\n";
  os << "dim " << gamma.dim() << '\n';
  for (const auto& a : gamma.atoms()) {
    os << format_double(a.weight);
    for (double c : a.direction) os << ' ' << format_double(c);
    os << '\n';
  }
}

DiscreteSpectralMeasure read_spectral_measure(std::istream& is) {
  std::string line;
  if (!next_data_line(is, line)) throw std::invalid_argument("spectral measure: missing 'dim' line");
  std::istringstream head(line);
  std::string key;
  long long dim = -1;
  if (!(head >> key >> dim) || key != "dim" || dim < 1)
    throw std::invalid_argument("spectral measure: expected 'dim <n>' with n >= 1");
  DiscreteSpectralMeasure g(static_cast<std::size_t>(dim));
  while (next_data_line(is, line)) {
    const std::vector<double> v = parse_numbers(line);
    if (v.size() != static_cast<std::size_t>(dim) + 1)
      throw std::invalid_argument("spectral measure: atom line has " + std::to_string(v.size()) +
                                  " numbers, expected " + std::to_string(dim + 1));
    g.add(std::span<const double>(v).subspan(1), v[0]);
  }
  return g;
}

void write_matrix(std::ostream& os, const Matrix& m, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "shape " << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? " " : "") << format_double(m(r, c));
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  std::string line;
  if (!next_data_line(is, line)) throw std::invalid_argument("matrix: missing 'shape' line");
  std::istringstream head(line);
  std::string key;
  long long rows = -1, cols = -1;
  if (!(head >> key >> rows >> cols) || key != "shape" || rows < 0 || cols < 0)
    throw std::invalid_argument("matrix: expected 'shape <rows> <cols>'");
  Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (long long r = 0; r < rows; ++r) {
    if (!next_data_line(is, line)) throw std::invalid_argument("matrix: too few rows");
    const std::vector<double> v = parse_numbers(line);
    if (v.size() != static_cast<std::size_t>(cols)) throw std::invalid_argument("matrix: row has wrong length");
    std::copy(v.begin(), v.end(), m.row(static_cast<std::size_t>(r)).begin());
  }
  return m;
}

void write_svg_heatmap(std::ostream& os, const Matrix& values, const std::string& title) {
  constexpr int kCell = 8, kMargin = 30;
  const std::size_t rows = values.rows(), cols = values.cols();
  double vmax = 0.0;
  for (double v : values.data())
    if (std::isfinite(v)) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) vmax = 1.0;
  const std::size_t w = cols * kCell + 2 * kMargin, h = rows * kCell + 2 * kMargin;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<text x=\"" << kMargin << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">" << title
     << " (|max| = " << format_double(vmax) << ")</text>\n";
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double t = std::clamp(values(r, c) / vmax, -1.0, 1.0);
      const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
      const int red = t >= 0.0 ? 255 : fade, blue = t >= 0.0 ? fade : 255;
      os << "<rect x=\"" << kMargin + c * kCell << "\" y=\"" << kMargin + r * kCell << "\" width=\"" << kCell
         << "\" height=\"" << kCell << "\" fill=\"rgb(" << red << ',' << fade << ',' << blue << ")\"/>\n";
    }
  os << "</svg>\n";
}

}  // namespace stablentk
