#include "topo9im/exact_geom.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "topo9im/error.hpp"

namespace topo9im {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::strong_ordering compare(const Rat& a, const Rat& b) {
  int c = cmp(a, b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

}  // namespace

Rat parse_rational(std::string_view text) {
  auto fail = [&]() -> Rat {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  Rat value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view num = body.substr(0, slash);
    std::string_view den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return fail();
    mpz_class d(std::string(den), 10);
    if (d == 0) return fail();
    value = Rat(mpz_class(std::string(num), 10), d);
    value.canonicalize();
  } else {
    auto dot = body.find('.');
    std::string_view whole = body.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if (!all_digits(whole)) return fail();
    if (dot != std::string_view::npos && !all_digits(frac)) return fail();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class digits(std::string(whole) + std::string(frac), 10);
    value = Rat(digits, scale);
    value.canonicalize();
  }
  return negative ? Rat(-value) : value;
}

std::string to_string(const Rat& r) { return r.get_str(10); }

double to_double(const Rat& r) { return r.get_d(); }

std::strong_ordering operator<=>(const Vec3& a, const Vec3& b) {
  if (auto c = compare(a.x, b.x); c != 0) return c;
  if (auto c = compare(a.y, b.y); c != 0) return c;
  return compare(a.z, b.z);
}

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(const Rat& s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }

Rat dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

std::string to_string(const Vec3& p) {
  return "(" + to_string(p.x) + "," + to_string(p.y) + "," + to_string(p.z) + ")";
}

Halfspace::Halfspace(Vec3 n, Rat b) : normal(std::move(n)), offset(std::move(b)) {
  if (normal.is_zero()) throw std::invalid_argument("halfspace with zero normal");
}

Halfspace Halfspace::canonical() const {
  const Rat* lead = &normal.x;
  if (sgn(*lead) == 0) lead = &normal.y;
  if (sgn(*lead) == 0) lead = &normal.z;
  Rat scale = 1 / abs(*lead);
  return Halfspace(scale * normal, scale * offset);
}

Halfspace Halfspace::flipped() const {
  return Halfspace(Vec3(-normal.x, -normal.y, -normal.z), -offset);
}

std::strong_ordering operator<=>(const Halfspace& a, const Halfspace& b) {
  if (auto c = a.normal <=> b.normal; c != 0) return c;
  return compare(a.offset, b.offset);
}

Side side(const Halfspace& h, const Point3& p) {
  int s = cmp(dot(h.normal, p), h.offset);
  return s < 0 ? Side::kNeg : (s > 0 ? Side::kPos : Side::kOn);
}

int rank(std::span<const Vec3> vectors) {
  std::vector<Vec3> rows(vectors.begin(), vectors.end());
  int r = 0;
  for (int col = 0; col < 3 && r < static_cast<int>(rows.size()); ++col) {
    auto pivot = std::find_if(rows.begin() + r, rows.end(),
                              [col](const Vec3& v) { return sgn(v[col]) != 0; });
    if (pivot == rows.end()) continue;
    std::swap(rows[r], *pivot);
    for (size_t i = r + 1; i < rows.size(); ++i) {
      if (sgn(rows[i][col]) == 0) continue;
      Rat f = rows[i][col] / rows[r][col];
      rows[i] = rows[i] - f * rows[r];
    }
    ++r;
  }
  return r;
}

int affine_dim(std::span<const Point3> points) {
  if (points.empty()) return -1;
  std::vector<Vec3> diffs;
  diffs.reserve(points.size() - 1);
  for (size_t i = 1; i < points.size(); ++i) diffs.push_back(points[i] - points[0]);
  return rank(diffs);
}

bool solve3(const std::array<const Halfspace*, 3>& planes, Point3& out) {
  const Vec3& a = planes[0]->normal;
  const Vec3& b = planes[1]->normal;
  const Vec3& c = planes[2]->normal;
  Vec3 bc = cross(b, c);
  Rat det = dot(a, bc);
  if (sgn(det) == 0) return false;
  // Cramer's rule in cross-product form.
  Vec3 ca = cross(c, a);
  Vec3 ab = cross(a, b);
  Vec3 sum = planes[0]->offset * bc + planes[1]->offset * ca + planes[2]->offset * ab;
  Rat inv = 1 / det;
  out = inv * sum;
  return true;
}

void dedupe(std::vector<Point3>& points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
}

}  // namespace topo9im
