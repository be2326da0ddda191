#include <random>

#include <gtest/gtest.h>

#include "topo9im/error.hpp"
#include "topo9im/exact_geom.hpp"

namespace topo9im {
namespace {

TEST(ParseRational, Decimals) {
  EXPECT_EQ(parse_rational("0.5"), Rat(1, 2));
  EXPECT_EQ(parse_rational("2"), Rat(2));
  EXPECT_EQ(parse_rational("-1.25"), Rat(-5, 4));
  EXPECT_EQ(parse_rational("0.1"), Rat(1, 10));
  EXPECT_EQ(parse_rational("007.500"), Rat(15, 2));
}

TEST(ParseRational, Fractions) {
  EXPECT_EQ(parse_rational("6/4"), Rat(3, 2));
  EXPECT_EQ(parse_rational("-3/9"), Rat(-1, 3));
  Rat r = parse_rational("10/4");
  EXPECT_EQ(r.get_num(), 5);
  EXPECT_EQ(r.get_den(), 2);
}

TEST(ParseRational, RejectsMalformed) {
  for (const char* bad : {"", "-", "1.", ".5", "1/0", "1/-2", "abc", "1e5", "1..2", "--1", "1/2/3", " 1"}) {
    EXPECT_THROW(parse_rational(bad), ParseError) << bad;
  }
  try {
    parse_rational("12x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("12x"), std::string::npos);
  }
}

TEST(ParseRational, RoundTripsRandomValues) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> num(-1000000, 1000000);
  std::uniform_int_distribution<long> den(1, 99999);
  for (int i = 0; i < 500; ++i) {
    Rat r(num(rng), den(rng));
    r.canonicalize();
    Rat s(num(rng), den(rng));
    s.canonicalize();
    EXPECT_EQ(parse_rational(to_string(r)), r);
    EXPECT_EQ((r + s) - s, r);
  }
}

TEST(Side, AgainstPlaneXEqualsOne) {
  Halfspace h(Vec3(1, 0, 0), 1);
  EXPECT_EQ(side(h, Point3(0, 0, 0)), Side::kNeg);
  EXPECT_EQ(side(h, Point3(1, 5, -3)), Side::kOn);
  EXPECT_EQ(side(h, Point3(2, 0, 0)), Side::kPos);
}

TEST(Halfspace, ZeroNormalRejected) { EXPECT_THROW(Halfspace(Vec3(0, 0, 0), 1), std::invalid_argument); }

TEST(Halfspace, CanonicalFormIsScaleInvariant) {
  Halfspace a(Vec3(2, 4, -6), 8);
  Halfspace b(Vec3(Rat(1, 3), Rat(2, 3), -1), Rat(4, 3));
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.canonical().normal.x, 1);
  Halfspace c(Vec3(0, -3, 0), 6);
  EXPECT_EQ(c.canonical(), Halfspace(Vec3(0, -1, 0), 2));
}

TEST(AffineDim, SmallCases) {
  EXPECT_EQ(affine_dim(std::vector<Point3>{}), -1);
  EXPECT_EQ(affine_dim(std::vector<Point3>{Point3(1, 2, 3)}), 0);
  EXPECT_EQ(affine_dim(std::vector<Point3>{Point3(0, 0, 0), Point3(1, 1, 1), Point3(2, 2, 2)}), 1);
  EXPECT_EQ(affine_dim(std::vector<Point3>{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)}), 2);
  std::vector<Point3> cube;
  for (int m = 0; m < 8; ++m) cube.emplace_back(m & 1, (m >> 1) & 1, (m >> 2) & 1);
  EXPECT_EQ(affine_dim(cube), 3);
}

TEST(AffineDim, ThreePlanesMeetInAPoint) {
  // Points ON three independent planes collapse to a single point.
  Halfspace x(Vec3(1, 0, 0), 1), y(Vec3(1, 1, 0), 2), z(Vec3(0, 1, 1), 3);
  Point3 p;
  ASSERT_TRUE(solve3({&x, &y, &z}, p));
  EXPECT_EQ(side(x, p), Side::kOn);
  EXPECT_EQ(side(y, p), Side::kOn);
  EXPECT_EQ(side(z, p), Side::kOn);
  std::vector<Point3> on = {p, p};
  EXPECT_LE(affine_dim(on), 0);
}

TEST(Solve3, DependentPlanes) {
  Halfspace a(Vec3(1, 0, 0), 1), b(Vec3(2, 0, 0), 5), c(Vec3(0, 0, 1), 0);
  Point3 p;
  EXPECT_FALSE(solve3({&a, &b, &c}, p));
}

}  // namespace
}  // namespace topo9im
