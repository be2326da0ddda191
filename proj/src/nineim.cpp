#include "topo9im/nineim.hpp"

#include "topo9im/error.hpp"

namespace topo9im {

namespace {

constexpr Part kI = Part::kInterior;
constexpr Part kB = Part::kBoundary;
constexpr Part kE = Part::kExterior;

Point3 centroid(std::span<const Point3> pts) {
  Point3 sum(0, 0, 0);
  for (const auto& p : pts) sum = sum + p;
  return Rat(1, pts.size()) * sum;
}

// A vertex of `from` outside `to`, with the halfspace of `to` it violates.
struct Escape {
  const Point3* vertex = nullptr;
  const Halfspace* violated = nullptr;
};

Escape find_escape(const Body& from, const Body& to) {
  for (const auto& v : from.vertices())
    for (const auto& h : to.halfspaces())
      if (side(h, v) == Side::kPos) return {&v, &h};
  return {};
}

// A point interior to `body` still outside the violated halfspace: slide the
// escaping vertex toward the body's centroid, stopping before the plane.
Point3 interior_escape(const Body& body, const Escape& esc) {
  const Halfspace& h = *esc.violated;
  const Point3& v = *esc.vertex;
  Point3 c = centroid(body.vertices());
  Rat sv = dot(h.normal, v) - h.offset;
  Rat sc = dot(h.normal, c) - h.offset;
  if (sgn(sc) > 0) return c;
  Rat t = sv / (2 * (sv - sc));
  return v + t * (c - v);
}

// Some facet of `facets_of` whose slice of the intersection reaches into the
// interior of `other`. The slice's vertices are the intersection vertices on
// that facet plane; its mean lies in the slice's relative interior, which is
// interior to `other` iff any point of the slice is.
std::optional<Point3> facet_reaching_interior(const Body& facets_of, const Body& other,
                                              std::span<const Point3> meet) {
  std::vector<Point3> slice;
  for (const auto& h : facets_of.halfspaces()) {
    slice.clear();
    for (const auto& k : meet)
      if (side(h, k) == Side::kOn) slice.push_back(k);
    if (slice.empty()) continue;
    Point3 r = centroid(slice);
    if (classify_point(other.polytope(), r) == Location::kIn) return r;
  }
  return std::nullopt;
}

void compute(const Body& a, const Body& b, Matrix9& m, std::array<std::optional<Point3>, 9>* wit) {
  auto put = [&](Part pa, Part pb, std::optional<Point3> w) {
    m.set(pa, pb, w.has_value());
    if (wit) (*wit)[Matrix9::index(pa, pb)] = std::move(w);
  };

  // Exterior/exterior: beyond both bounding boxes on the x axis.
  Rat far = (a.upper().x > b.upper().x ? a.upper().x : b.upper().x) + 1;
  put(kE, kE, Point3(far, 0, 0));

  // A ⊄ B puts a vertex of A (a boundary point) outside B, and a nearby
  // interior point of A too; so IE and BE share one test.
  if (Escape esc = find_escape(a, b); esc.vertex) {
    put(kB, kE, *esc.vertex);
    put(kI, kE, wit ? std::optional(interior_escape(a, esc)) : std::optional(Point3()));
  } else {
    put(kB, kE, std::nullopt);
    put(kI, kE, std::nullopt);
  }
  if (Escape esc = find_escape(b, a); esc.vertex) {
    put(kE, kB, *esc.vertex);
    put(kE, kI, wit ? std::optional(interior_escape(b, esc)) : std::optional(Point3()));
  } else {
    put(kE, kB, std::nullopt);
    put(kE, kI, std::nullopt);
  }

  std::vector<Point3> meet = intersection_vertices(a, b);
  const int d = affine_dim(meet);
  if (d < 0) {
    put(kI, kI, std::nullopt);
    put(kI, kB, std::nullopt);
    put(kB, kI, std::nullopt);
    put(kB, kB, std::nullopt);
    return;
  }
  if (d < 3) {
    // Interiors are disjoint, so the whole intersection lies on both
    // boundaries. An interior point of one body on the other's boundary
    // would force interior contact, so IB and BI are empty.
    put(kI, kI, std::nullopt);
    put(kI, kB, std::nullopt);
    put(kB, kI, std::nullopt);
    put(kB, kB, meet.front());
    return;
  }

  put(kI, kI, centroid(meet));
  put(kI, kB, facet_reaching_interior(b, a, meet));
  put(kB, kI, facet_reaching_interior(a, b, meet));

  // Boundaries meet iff some nonempty face of the intersection lies on a
  // facet of each body; every such face has a vertex of the intersection.
  std::optional<Point3> bb;
  for (const auto& k : meet) {
    if (classify_point(a.polytope(), k) == Location::kOn &&
        classify_point(b.polytope(), k) == Location::kOn) {
      bb = k;
      break;
    }
  }
  put(kB, kB, std::move(bb));
}

}  // namespace

Matrix9 Matrix9::transposed() const {
  Matrix9 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.bits_[j * 3 + i] = bits_[i * 3 + j];
  return t;
}

std::string Matrix9::to_string() const {
  std::string s;
  for (bool b : bits_) s += b ? 'T' : 'F';
  return s;
}

Matrix9 Matrix9::parse(std::string_view text) {
  if (text.size() != 9) throw ParseError("matrix string must have 9 characters: '" + std::string(text) + "'");
  Matrix9 m;
  for (size_t i = 0; i < 9; ++i) {
    if (text[i] != 'T' && text[i] != 'F')
      throw ParseError("matrix cell must be T or F: '" + std::string(text) + "'");
    m.bits_[i] = text[i] == 'T';
  }
  return m;
}

std::string_view relation_name(TopoRelation r) {
  switch (r) {
    case TopoRelation::kDisjoint: return "disjoint";
    case TopoRelation::kMeets: return "meets";
    case TopoRelation::kEquals: return "equals";
    case TopoRelation::kInside: return "inside";
    case TopoRelation::kContains: return "contains";
    case TopoRelation::kCovers: return "covers";
    case TopoRelation::kCoveredBy: return "coveredBy";
    case TopoRelation::kOverlaps: return "overlaps";
  }
  return "";
}

std::optional<TopoRelation> relation_from_name(std::string_view name) {
  for (TopoRelation r : kAllRelations)
    if (relation_name(r) == name) return r;
  return std::nullopt;
}

TopoRelation inverse_relation(TopoRelation r) {
  switch (r) {
    case TopoRelation::kInside: return TopoRelation::kContains;
    case TopoRelation::kContains: return TopoRelation::kInside;
    case TopoRelation::kCovers: return TopoRelation::kCoveredBy;
    case TopoRelation::kCoveredBy: return TopoRelation::kCovers;
    default: return r;
  }
}

MatrixPattern::MatrixPattern(std::string_view cells) {
  if (cells.size() != 9) throw ParseError("pattern must have 9 cells: '" + std::string(cells) + "'");
  for (size_t i = 0; i < 9; ++i) {
    switch (cells[i]) {
      case 'T': cells_[i] = Cell::kNonEmpty; break;
      case 'F': cells_[i] = Cell::kEmpty; break;
      case '*': cells_[i] = Cell::kAny; break;
      default: throw ParseError("pattern cell must be T, F or *: '" + std::string(cells) + "'");
    }
  }
}

bool MatrixPattern::matches(const Matrix9& m) const {
  for (size_t i = 0; i < 9; ++i) {
    if (cells_[i] == Cell::kNonEmpty && !m[i]) return false;
    if (cells_[i] == Cell::kEmpty && m[i]) return false;
  }
  return true;
}

std::string MatrixPattern::to_string() const {
  std::string s;
  for (Cell c : cells_) s += c == Cell::kNonEmpty ? 'T' : (c == Cell::kEmpty ? 'F' : '*');
  return s;
}

MatrixPattern relation_pattern(TopoRelation r) {
  switch (r) {
    case TopoRelation::kDisjoint: return MatrixPattern("FFTFFTTTT");
    // Only II empty with BB nonempty. A variant that also marks
    // interior(A) ∩ boundary(B) nonempty is unrealizable by bodies.
    case TopoRelation::kMeets: return MatrixPattern("F***T****");
    case TopoRelation::kContains: return MatrixPattern("T*****FF*");
    case TopoRelation::kInside: return MatrixPattern("T*F**F***");
    case TopoRelation::kEquals: return MatrixPattern("*FFF*FFF*");
    default: return full_pattern(r);
  }
}

MatrixPattern full_pattern(TopoRelation r) {
  switch (r) {
    case TopoRelation::kDisjoint: return MatrixPattern("FFTFFTTTT");
    case TopoRelation::kMeets: return MatrixPattern("FFTFTTTTT");
    case TopoRelation::kEquals: return MatrixPattern("TFFFTFFFT");
    case TopoRelation::kInside: return MatrixPattern("TFFTFFTTT");
    case TopoRelation::kContains: return MatrixPattern("TTTFFTFFT");
    case TopoRelation::kCoveredBy: return MatrixPattern("TFFTTFTTT");
    case TopoRelation::kCovers: return MatrixPattern("TTTFTTFFT");
    case TopoRelation::kOverlaps: return MatrixPattern("TTTTTTTTT");
  }
  return MatrixPattern("*********");
}

TopoRelation classify(const Matrix9& m) {
  for (TopoRelation r : kAllRelations)
    if (full_pattern(r).matches(m)) return r;
  throw UnclassifiableMatrix("no relation matches matrix " + m.to_string());
}

Matrix9 compute_matrix(const Body& a, const Body& b) {
  Matrix9 m;
  compute(a, b, m, nullptr);
  return m;
}

WitnessedMatrix compute_matrix_witnessed(const Body& a, const Body& b) {
  WitnessedMatrix out;
  compute(a, b, out.matrix, &out.witness);
  return out;
}

}  // namespace topo9im
