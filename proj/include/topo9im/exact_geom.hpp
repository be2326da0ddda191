#pragma once

#include <array>
#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace topo9im {

// Exact rational scalar. GMP keeps mpq values canonical (gcd 1, positive
// denominator) after every arithmetic operation.
using Rat = mpq_class;

// Parses `[-]digits[.digits]` or `[-]digits/digits`. Decimals are read
// exactly, so "0.1" is 1/10.
Rat parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is 1. Always re-parsable.
std::string to_string(const Rat& r);

double to_double(const Rat& r);

struct Vec3 {
  Rat x, y, z;

  Vec3() = default;
  Vec3(Rat x_, Rat y_, Rat z_) : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}

  const Rat& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  Rat& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  bool is_zero() const { return sgn(x) == 0 && sgn(y) == 0 && sgn(z) == 0; }

  friend bool operator==(const Vec3& a, const Vec3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }
  friend std::strong_ordering operator<=>(const Vec3& a, const Vec3& b);
};

using Point3 = Vec3;

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(const Rat& s, const Vec3& v);
Rat dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);

std::string to_string(const Vec3& p);

// Closed halfspace {p : normal . p <= offset}. Also used to carry a plane
// (the boundary {normal . p == offset}) when it appears as an equality.
struct Halfspace {
  Vec3 normal;
  Rat offset;

  Halfspace() = default;
  // Throws std::invalid_argument for a zero normal.
  Halfspace(Vec3 n, Rat b);

  // Same point set, unique representative: the first nonzero normal
  // component is scaled to +-1.
  Halfspace canonical() const;
  // The complementary closed halfspace sharing this boundary plane.
  Halfspace flipped() const;

  friend bool operator==(const Halfspace& a, const Halfspace& b) {
    return a.normal == b.normal && a.offset == b.offset;
  }
  friend std::strong_ordering operator<=>(const Halfspace& a, const Halfspace& b);
};

using Plane = Halfspace;

enum class Side { kNeg, kOn, kPos };

// Sign of normal . p - offset.
Side side(const Halfspace& h, const Point3& p);

// -1 for no points, otherwise the dimension of the affine hull.
int affine_dim(std::span<const Point3> points);

// Rank of a set of vectors, by exact elimination.
int rank(std::span<const Vec3> vectors);

// Unique solution of the 3x3 system rows[i] . x = rhs[i], or false when the
// rows are linearly dependent.
bool solve3(const std::array<const Halfspace*, 3>& planes, Point3& out);

// Sorts and removes duplicates.
void dedupe(std::vector<Point3>& points);

}  // namespace topo9im
