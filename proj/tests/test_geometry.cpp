#include <gtest/gtest.h>

#include <stdexcept>

#include "linkc/geometry.hpp"

using namespace linkc;

TEST(Disc, ContainsBoundaryWithSlack) {
  const Disc d{{1.0, 1.0}, 2.0};
  EXPECT_TRUE(d.contains({3.0, 1.0}));
  EXPECT_TRUE(d.contains({3.0 + 1e-10, 1.0}));
  EXPECT_FALSE(d.contains({3.001, 1.0}));
  EXPECT_FALSE(d.contains({3.0 + 1e-10, 1.0}, 0.0));
}

TEST(Domain, ChecksArityAndEveryFactor) {
  const Domain dom{{Disc{{}, 1.0}, Disc{{5.0, 0.0}, 1.0}}};
  const std::vector<PlanePoint> good{0.5, 5.5};
  const std::vector<PlanePoint> bad{0.5, 0.0};
  const std::vector<PlanePoint> short_input{0.5};
  EXPECT_TRUE(dom.contains(good));
  EXPECT_FALSE(dom.contains(bad));
  EXPECT_FALSE(dom.contains(short_input));
  EXPECT_EQ(dom.center(), (std::vector<PlanePoint>{0.0, 5.0}));
}

TEST(ComplexText, ParsesLiterals) {
  EXPECT_EQ(parse_complex("2"), PlanePoint(2.0, 0.0));
  EXPECT_EQ(parse_complex("-3i"), PlanePoint(0.0, -3.0));
  EXPECT_EQ(parse_complex("0.5+0.5i"), PlanePoint(0.5, 0.5));
  EXPECT_EQ(parse_complex("1e-3-2i"), PlanePoint(1e-3, -2.0));
  EXPECT_EQ(parse_complex("i"), PlanePoint(0.0, 1.0));
}

TEST(ComplexText, RejectsMalformed) {
  EXPECT_THROW(parse_complex(""), std::invalid_argument);
  EXPECT_THROW(parse_complex("1+"), std::invalid_argument);
  EXPECT_THROW(parse_complex("abc"), std::invalid_argument);
}

TEST(ComplexText, FormatRoundTrips) {
  for (PlanePoint z : {PlanePoint{0.1, -0.2}, PlanePoint{1e-17, 3.0}, PlanePoint{-2.5, 0.0}, PlanePoint{0.0, 0.0}}) {
    EXPECT_EQ(parse_complex(format_complex(z)), z) << format_complex(z);
  }
}

TEST(ComplexText, RoundedAlwaysShowsBothParts) {
  EXPECT_EQ(format_complex_rounded({0.0, 0.5}), "0+0.5i");
  EXPECT_EQ(format_complex_rounded({0.25, 1e-20}), "0.25+0i");
  EXPECT_EQ(format_complex_rounded({-1.0, -2.0}), "-1-2i");
}
