#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "topo9im/polytope.hpp"

namespace topo9im {

enum class Part { kInterior = 0, kBoundary = 1, kExterior = 2 };

// Emptiness bits of the nine intersections between the interior, boundary
// and exterior of A (rows) and of B (columns). true means nonempty.
class Matrix9 {
 public:
  Matrix9() = default;

  bool at(Part a, Part b) const { return bits_[index(a, b)]; }
  void set(Part a, Part b, bool nonempty) { bits_[index(a, b)] = nonempty; }
  bool operator[](size_t i) const { return bits_[i]; }

  Matrix9 transposed() const;

  // Row-major, 'T' for nonempty and 'F' for empty, e.g. "FFTFFTTTT".
  std::string to_string() const;
  // Inverse of to_string; throws ParseError.
  static Matrix9 parse(std::string_view text);

  bool operator==(const Matrix9&) const = default;

  static constexpr size_t index(Part a, Part b) {
    return static_cast<size_t>(a) * 3 + static_cast<size_t>(b);
  }

 private:
  std::array<bool, 9> bits_{};
};

enum class TopoRelation { kDisjoint, kMeets, kEquals, kInside, kContains, kCovers, kCoveredBy, kOverlaps };

inline constexpr std::array<TopoRelation, 8> kAllRelations = {
    TopoRelation::kDisjoint, TopoRelation::kMeets,  TopoRelation::kEquals,    TopoRelation::kInside,
    TopoRelation::kContains, TopoRelation::kCovers, TopoRelation::kCoveredBy, TopoRelation::kOverlaps};

// Lower camel case, matching the knowledge-base property local names:
// "disjoint", "meets", ..., "coveredBy".
std::string_view relation_name(TopoRelation r);
std::optional<TopoRelation> relation_from_name(std::string_view name);

TopoRelation inverse_relation(TopoRelation r);

// A 9-cell pattern where each cell is empty, nonempty or unconstrained.
class MatrixPattern {
 public:
  enum class Cell { kEmpty, kNonEmpty, kAny };

  // 9 characters from {F, T, *}, row-major.
  explicit MatrixPattern(std::string_view cells);

  bool matches(const Matrix9& m) const;
  std::string to_string() const;
  Cell at(Part a, Part b) const { return cells_[Matrix9::index(a, b)]; }

 private:
  std::array<Cell, 9> cells_{};
};

// The conventional partial pattern for r, wildcards included: disjoint is
// fully specified, meets/contains/equals carry wildcards. The remaining
// relations fall back to their full pattern (inside as the transpose of
// contains).
MatrixPattern relation_pattern(TopoRelation r);

// The complete pattern reachable by body pairs in relation r. The eight full
// patterns are pairwise distinct, so classify is a lookup.
MatrixPattern full_pattern(TopoRelation r);

// Throws UnclassifiableMatrix when no full pattern matches, which only an
// internal error can produce for valid bodies.
TopoRelation classify(const Matrix9& m);

Matrix9 compute_matrix(const Body& a, const Body& b);

// compute_matrix plus, for every nonempty cell, a concrete point lying in
// that cell's intersection (e.g. witness[index(kInterior, kExterior)] is a
// point interior to A and exterior to B).
struct WitnessedMatrix {
  Matrix9 matrix;
  std::array<std::optional<Point3>, 9> witness;
};
WitnessedMatrix compute_matrix_witnessed(const Body& a, const Body& b);

inline TopoRelation relate(const Body& a, const Body& b) { return classify(compute_matrix(a, b)); }

}  // namespace topo9im
