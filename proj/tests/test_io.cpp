#include <sstream>

#include <gtest/gtest.h>

#include "hullmle/io.hpp"

using namespace hullmle;

namespace {

std::size_t error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_matrix_csv(in, "t.csv");
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Csv, ReadsRowsAndSkipsBlankLines) {
  std::istringstream in("1,2.5\n\n -3 , 4e-2\r\n+5,6\n");
  const Matrix m = read_matrix_csv(in);
  ASSERT_EQ(m.rows(), 3u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_EQ(m(0, 1), 2.5);
  EXPECT_EQ(m(1, 0), -3.0);
  EXPECT_EQ(m(1, 1), 0.04);
  EXPECT_EQ(m(2, 0), 5.0);
}

TEST(Csv, ErrorsCarryTheLineNumber) {
  EXPECT_EQ(error_line("1,2\n3,x\n"), 2u);
  EXPECT_EQ(error_line("1,2\n\n3\n"), 3u);
  EXPECT_EQ(error_line("1,,2\n"), 1u);
  EXPECT_EQ(error_line("1,2\nnan,1\n"), 2u);
  EXPECT_EQ(error_line("1,2\n1,inf\n"), 2u);
  EXPECT_EQ(error_line("\n\n"), 2u);
  std::istringstream in("a\n");
  try {
    read_matrix_csv(in, "pts.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("pts.csv:1:", 0), 0u);
  }
}

TEST(Csv, MissingFileIsAFileError) { EXPECT_THROW(read_matrix_csv("/nonexistent/x.csv"), FileError); }

TEST(Csv, WriteThenReadIsExact) {
  Rng rng(11);
  Matrix m(7, 3);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(i) - 3);
  m(0, 0) = 0.1;
  m(1, 1) = 1.0 / 3.0;
  m(2, 2) = -5e-300;
  std::stringstream ss;
  write_matrix_csv(ss, m);
  const Matrix back = read_matrix_csv(ss);
  ASSERT_EQ(back.rows(), m.rows());
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(back(i, j), m(i, j));
}

TEST(GraphFile, ParsesOneBasedEdges) {
  std::istringstream in("4\n1 2\n\n3 4\n2 4\n");
  const Graph g = read_graph(in);
  EXPECT_EQ(g.vertices(), 4u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(2, 3));
  EXPECT_TRUE(g.has_edge(3, 1));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(GraphFile, RejectsBadInput) {
  for (const char* text : {"", "1\n", "3 3\n", "3\n1 4\n", "3\n2 2\n", "3\n1 2\n2 1\n", "3\n1 2 3\n", "x\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_graph(in), ParseError) << text;
  }
}

TEST(MaskFile, UnlistedDyadsAreMissing) {
  std::istringstream gin("3\n1 2\n");
  const Graph y = read_graph(gin);
  std::istringstream min("1 2 1\n2 3 0\n");
  const ObservationMask m = read_mask(min, y);
  EXPECT_EQ(m.observed_count(), 2u);
  ASSERT_EQ(m.free_dyads().size(), 1u);
  EXPECT_FALSE(m.observed(y.dyad_index(0, 2)));
}

TEST(MaskFile, RejectsConflictsAndDuplicates) {
  std::istringstream gin("3\n1 2\n");
  const Graph y = read_graph(gin);
  for (const char* text : {"1 2 0\n", "1 2 1\n2 1 1\n", "1 3 2\n", "1 4 0\n", "1 1 0\n", "1 2\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_mask(in, y), ParseError) << text;
  }
}
