#pragma once

#include <span>
#include <utility>
#include <vector>

#include "topo9im/exact_geom.hpp"

namespace topo9im {

struct Facet {
  size_t halfspace;             // index into Polytope::halfspaces()
  std::vector<size_t> vertices; // indices into Polytope::vertices(), sorted
};

// Bounded convex polytope in R^3 held in both representations.
//
// halfspaces() is irredundant and canonical (see Halfspace::canonical) and
// sorted; for a polytope of dimension d < 3 the halfspaces are its relative
// facets and equalities() pins down the affine hull. vertices() are exactly
// the extreme points, sorted lexicographically. A default-constructed
// Polytope is the empty set (dim -1).
class Polytope {
 public:
  Polytope() = default;

  // Throws EmptyGeometry on an empty list.
  static Polytope hull_from_points(std::span<const Point3> points);

  // Vertex enumeration over all triples of bounding planes. An infeasible
  // system gives the empty polytope; a feasible unbounded one (including an
  // unconstrained system) throws Unbounded.
  static Polytope from_halfspaces(std::span<const Halfspace> halfspaces,
                                  std::span<const Plane> equalities);

  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<Plane>& equalities() const { return equalities_; }
  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  int dim() const { return dim_; }
  bool empty() const { return dim_ < 0; }

  // Membership in the closed polytope.
  bool contains(const Point3& p) const;

 private:
  std::vector<Halfspace> halfspaces_;
  std::vector<Plane> equalities_;
  std::vector<Point3> vertices_;
  std::vector<Facet> facets_;
  int dim_ = -1;
};

struct Edge {
  size_t from;
  size_t to;
};

// Full-dimensional bounded polytope: the admissible geometric individual.
class Body {
 public:
  // Throws InvalidBody unless p.dim() == 3.
  explicit Body(Polytope p);

  static Body from_points(std::span<const Point3> points) {
    return Body(Polytope::hull_from_points(points));
  }

  const Polytope& polytope() const { return poly_; }
  const std::vector<Halfspace>& halfspaces() const { return poly_.halfspaces(); }
  const std::vector<Point3>& vertices() const { return poly_.vertices(); }
  const std::vector<Facet>& facets() const { return poly_.facets(); }
  const std::vector<Edge>& edges() const { return edges_; }

  // Axis-aligned bounds of the vertex set.
  const Point3& lower() const { return lower_; }
  const Point3& upper() const { return upper_; }

  bool operator==(const Body& other) const { return vertices() == other.vertices(); }

 private:
  Polytope poly_;
  std::vector<Edge> edges_;
  Point3 lower_;
  Point3 upper_;
};

// Convenience for fixtures: the box [lo.x,hi.x] x [lo.y,hi.y] x [lo.z,hi.z].
Body make_box(const Point3& lo, const Point3& hi);

Polytope intersect(const Polytope& p, const Polytope& q);

enum class Location { kIn, kOn, kOut };

// IN: strictly inside every halfspace (only possible for dim 3).
// ON: a member touching at least one bounding plane. OUT: not a member.
Location classify_point(const Polytope& p, const Point3& point);

// Mean of the vertices. Throws EmptyGeometry for the empty polytope.
Point3 relint_point(const Polytope& p);

// True iff some point satisfies every halfspace and lies on every plane.
bool feasible(std::span<const Halfspace> halfspaces, std::span<const Plane> equalities);

bool is_subset(const Body& p, const Body& q);

// Extreme points of p ∩ q, sorted and deduplicated. Every vertex of the
// intersection is a vertex of one body lying in the other, or a point where
// an edge of one body crosses a facet plane of the other, so this is
// O(|E|·|F|) instead of enumerating plane triples.
std::vector<Point3> intersection_vertices(const Body& p, const Body& q);

// True iff the bounding boxes are separated by a gap on some axis, which
// proves the bodies disjoint.
bool boxes_separated(const Body& p, const Body& q);

}  // namespace topo9im
