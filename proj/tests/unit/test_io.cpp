#include <gtest/gtest.h>

#include <sstream>

#include "stablentk/io.hpp"

using namespace stablentk;

TEST(Io, FormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Io, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(digest_hex(0xabcULL), "0000000000000abc");
}

TEST(Io, SpectralMeasureRoundTrip) {
  DiscreteSpectralMeasure g(3);
  g.add(std::vector<double>{1.0, 2.0, 2.0}, 0.125);
  g.add(std::vector<double>{0.0, 0.0, -1.0}, 1.0 / 3.0);
  std::stringstream ss;
  write_spectral_measure(ss, g, "note");
  const DiscreteSpectralMeasure back = read_spectral_measure(ss);
  ASSERT_EQ(back.atoms().size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.atoms()[i].weight, g.atoms()[i].weight);
    EXPECT_EQ(back.atoms()[i].direction, g.atoms()[i].direction);
  }
  std::istringstream bad("dim 2\n1 0.5\n");
  EXPECT_THROW(read_spectral_measure(bad), std::invalid_argument);
}

TEST(Io, MatrixRoundTrip) {
  const Matrix m{{1.0 / 7.0, -2.0}, {3e-9, 4.0}, {5.5, 6.0}};
  std::stringstream ss;
  write_matrix(ss, m, "c");
  EXPECT_EQ(read_matrix(ss), m);
  std::istringstream bad("shape 2 2\n1 2\n");
  EXPECT_THROW(read_matrix(bad), std::invalid_argument);
}

TEST(Io, TableRejectsRaggedRows) {
  Table t;
  t.columns = {"a", "b"};
  t.add_row({"1", "2"});
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
  t.comments = {"hello"};
  std::ostringstream os;
  t.write(os);
  EXPECT_EQ(os.str(), "# hello\na,b\n1,2\n");
}

TEST(Io, SvgIsSelfContained) {
  std::ostringstream os;
  write_svg_heatmap(os, Matrix{{1.0, -1.0}, {0.0, 0.5}}, "t");
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_NE(s.find("rgb(255,0,0)"), std::string::npos);
  EXPECT_NE(s.find("rgb(0,0,255)"), std::string::npos);
}
