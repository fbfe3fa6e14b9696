#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "surecov/io.hpp"

using namespace surecov;

TEST(ReadCsv, HeaderBlankLinesAndBom) {
  std::istringstream in("\xEF\xBB\xBFx1,x2\n1,2\n\n3.5, -4e-1\n");
  const Eigen::MatrixXd m = read_csv_matrix(in);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_EQ(m(1, 0), 3.5);
  EXPECT_EQ(m(1, 1), -0.4);
}

TEST(ReadCsv, NoHeader) {
  std::istringstream in("1,2,3\n4,5,6\n");
  EXPECT_EQ(read_csv_matrix(in).rows(), 2);
}

TEST(ReadCsv, RaggedRowNamesLine) {
  std::istringstream in("1,2\n3,4\n5\n");
  try {
    read_csv_matrix(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ReadCsv, NonNumericCellNamesLocation) {
  std::istringstream in("a,b\n1,2\n3,oops\n");
  try {
    read_csv_matrix(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 2u);
  }
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-300, -123456.789, std::numeric_limits<double>::max()}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(WriteBand, UpperTriangleOneBased) {
  Eigen::MatrixXd m(3, 3);
  m << 1, 2, 0, 2, 3, 4, 0, 4, 5;
  std::ostringstream out;
  write_band_csv(out, SymMatrix(m), 2);
  EXPECT_EQ(out.str(), "1,1,1\n1,2,2\n2,2,3\n2,3,4\n3,3,5\n");
}

TEST(WriteMatrix, RoundTrip) {
  Eigen::MatrixXd m(2, 3);
  m << 0.1, -2, 1e-17, 3, 4.25, 1.0 / 3.0;
  std::stringstream io;
  write_matrix_csv(io, m);
  EXPECT_TRUE(read_csv_matrix(io) == m);
}
