#include "topo9im/polytope.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "topo9im/error.hpp"

namespace topo9im {

namespace {

const Vec3 kAxes[3] = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};

bool satisfies(std::span<const Halfspace> hs, std::span<const Plane> eq, const Point3& p) {
  for (const auto& h : hs)
    if (side(h, p) == Side::kPos) return false;
  for (const auto& e : eq)
    if (side(e, p) != Side::kOn) return false;
  return true;
}

// Planes through p0 whose normals span the orthogonal complement of `dirs`.
std::vector<Plane> affine_hull_planes(const Point3& p0, const std::vector<Vec3>& dirs) {
  std::vector<Vec3> normals;
  switch (dirs.size()) {
    case 0:
      normals.assign(std::begin(kAxes), std::end(kAxes));
      break;
    case 1:
      for (const auto& axis : kAxes) {
        Vec3 n = cross(dirs[0], axis);
        if (n.is_zero()) continue;
        normals.push_back(n);
        if (normals.size() == 2 && rank(normals) == 1) normals.pop_back();
        if (normals.size() == 2) break;
      }
      break;
    case 2:
      normals.push_back(cross(dirs[0], dirs[1]));
      break;
    default:
      break;
  }
  std::vector<Plane> planes;
  for (const auto& n : normals) planes.push_back(Plane(n, dot(n, p0)).canonical());
  std::sort(planes.begin(), planes.end());
  return planes;
}

// Picks `want` affinely independent directions from the point cloud.
std::vector<Vec3> spanning_directions(std::span<const Point3> pts, int want) {
  std::vector<Vec3> dirs;
  for (size_t i = 1; i < pts.size() && static_cast<int>(dirs.size()) < want; ++i) {
    dirs.push_back(pts[i] - pts[0]);
    if (rank(dirs) < static_cast<int>(dirs.size())) dirs.pop_back();
  }
  return dirs;
}

// Keeps the plane through `through` with normal n if every point is on one
// side; returns the outward-oriented canonical halfspace.
std::optional<Halfspace> supporting(const Vec3& n, const Point3& through,
                                    std::span<const Point3> pts) {
  Rat b = dot(n, through);
  bool any_pos = false, any_neg = false;
  for (const auto& p : pts) {
    int s = cmp(dot(n, p), b);
    any_pos |= s > 0;
    any_neg |= s < 0;
    if (any_pos && any_neg) return std::nullopt;
  }
  Halfspace h(n, b);
  if (any_pos) h = h.flipped();
  return h.canonical();
}

}  // namespace

Polytope Polytope::hull_from_points(std::span<const Point3> input) {
  if (input.empty()) throw EmptyGeometry("convex hull of an empty point list");
  std::vector<Point3> pts(input.begin(), input.end());
  dedupe(pts);

  Polytope out;
  out.dim_ = affine_dim(pts);
  std::vector<Vec3> dirs = spanning_directions(pts, out.dim_);
  out.equalities_ = affine_hull_planes(pts[0], dirs);

  std::set<Halfspace> found;
  const size_t n = pts.size();
  switch (out.dim_) {
    case 3: {
      // ON-sets of accepted facets, to skip triples on a known facet.
      std::vector<std::vector<bool>> on_sets;
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
          for (size_t k = j + 1; k < n; ++k) {
            bool known = std::any_of(on_sets.begin(), on_sets.end(), [&](const auto& on) {
              return on[i] && on[j] && on[k];
            });
            if (known) continue;
            Vec3 normal = cross(pts[j] - pts[i], pts[k] - pts[i]);
            if (normal.is_zero()) continue;
            auto h = supporting(normal, pts[i], pts);
            if (!h || !found.insert(*h).second) continue;
            std::vector<bool> on(n);
            for (size_t m = 0; m < n; ++m) on[m] = side(*h, pts[m]) == Side::kOn;
            on_sets.push_back(std::move(on));
          }
        }
      }
      break;
    }
    case 2: {
      const Vec3& plane_normal = out.equalities_[0].normal;
      for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
          if (auto h = supporting(cross(pts[j] - pts[i], plane_normal), pts[i], pts)) found.insert(*h);
      break;
    }
    case 1:
      for (size_t i = 0; i < n; ++i)
        if (auto h = supporting(dirs[0], pts[i], pts)) found.insert(*h);
      break;
    default:
      break;
  }
  out.halfspaces_.assign(found.begin(), found.end());

  // A point is extreme iff the planes tight at it have full rank.
  for (const auto& p : pts) {
    std::vector<Vec3> tight;
    for (const auto& e : out.equalities_) tight.push_back(e.normal);
    for (const auto& h : out.halfspaces_)
      if (side(h, p) == Side::kOn) tight.push_back(h.normal);
    if (rank(tight) == 3) out.vertices_.push_back(p);
  }

  for (size_t f = 0; f < out.halfspaces_.size(); ++f) {
    Facet facet{f, {}};
    for (size_t v = 0; v < out.vertices_.size(); ++v)
      if (side(out.halfspaces_[f], out.vertices_[v]) == Side::kOn) facet.vertices.push_back(v);
    out.facets_.push_back(std::move(facet));
  }
  return out;
}

Polytope Polytope::from_halfspaces(std::span<const Halfspace> halfspaces,
                                   std::span<const Plane> equalities) {
  std::vector<const Halfspace*> planes;
  std::vector<Vec3> normals;
  for (const auto& e : equalities) planes.push_back(&e);
  for (const auto& h : halfspaces) planes.push_back(&h);
  for (const auto* p : planes) normals.push_back(p->normal);

  if (rank(normals) < 3) {
    // The solution set, if any, contains a line.
    if (feasible(halfspaces, equalities)) throw Unbounded("halfspace system contains a line");
    return Polytope();
  }

  std::vector<Point3> verts;
  const size_t m = planes.size();
  Point3 p;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      for (size_t k = j + 1; k < m; ++k)
        if (solve3({planes[i], planes[j], planes[k]}, p) && satisfies(halfspaces, equalities, p))
          verts.push_back(p);
  if (verts.empty()) return Polytope();

  // Pointed and nonempty: unbounded iff the recession cone has an extreme
  // ray, which is cut out by two independent tight constraints.
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      Vec3 d = cross(planes[i]->normal, planes[j]->normal);
      if (d.is_zero()) continue;
      for (int sign : {1, -1}) {
        Vec3 ray = Rat(sign) * d;
        bool recedes = std::all_of(halfspaces.begin(), halfspaces.end(),
                                   [&](const Halfspace& h) { return sgn(dot(h.normal, ray)) <= 0; }) &&
                       std::all_of(equalities.begin(), equalities.end(),
                                   [&](const Plane& e) { return sgn(dot(e.normal, ray)) == 0; });
        if (recedes) throw Unbounded("halfspace system recedes along " + to_string(ray));
      }
    }
  }
  return hull_from_points(verts);
}

bool Polytope::contains(const Point3& p) const {
  return !empty() && satisfies(halfspaces_, equalities_, p);
}

Body::Body(Polytope p) : poly_(std::move(p)) {
  if (poly_.dim() != 3)
    throw InvalidBody("body must be full-dimensional, got dimension " + std::to_string(poly_.dim()));

  const auto& verts = poly_.vertices();
  std::vector<std::vector<size_t>> incident(verts.size());
  for (size_t f = 0; f < poly_.facets().size(); ++f)
    for (size_t v : poly_.facets()[f].vertices) incident[v].push_back(f);
  // Two vertices span an edge iff at least two facets contain both.
  for (size_t a = 0; a < verts.size(); ++a) {
    for (size_t b = a + 1; b < verts.size(); ++b) {
      std::vector<size_t> common;
      std::set_intersection(incident[a].begin(), incident[a].end(), incident[b].begin(),
                            incident[b].end(), std::back_inserter(common));
      if (common.size() >= 2) edges_.push_back({a, b});
    }
  }

  lower_ = upper_ = verts.front();
  for (const auto& v : verts) {
    for (int i = 0; i < 3; ++i) {
      if (v[i] < lower_[i]) lower_[i] = v[i];
      if (v[i] > upper_[i]) upper_[i] = v[i];
    }
  }
}

Body make_box(const Point3& lo, const Point3& hi) {
  std::vector<Point3> corners;
  for (int mask = 0; mask < 8; ++mask)
    corners.emplace_back(mask & 1 ? hi.x : lo.x, mask & 2 ? hi.y : lo.y, mask & 4 ? hi.z : lo.z);
  return Body::from_points(corners);
}

Polytope intersect(const Polytope& p, const Polytope& q) {
  if (p.empty() || q.empty()) return Polytope();
  std::vector<Halfspace> hs = p.halfspaces();
  hs.insert(hs.end(), q.halfspaces().begin(), q.halfspaces().end());
  std::vector<Plane> eq = p.equalities();
  eq.insert(eq.end(), q.equalities().begin(), q.equalities().end());
  return Polytope::from_halfspaces(hs, eq);
}

Location classify_point(const Polytope& p, const Point3& point) {
  if (!p.contains(point)) return Location::kOut;
  if (p.dim() < 3) return Location::kOn;
  for (const auto& h : p.halfspaces())
    if (side(h, point) == Side::kOn) return Location::kOn;
  return Location::kIn;
}

Point3 relint_point(const Polytope& p) {
  if (p.empty()) throw EmptyGeometry("relative interior point of an empty polytope");
  Point3 sum(0, 0, 0);
  for (const auto& v : p.vertices()) sum = sum + v;
  return Rat(1, p.vertices().size()) * sum;
}

bool feasible(std::span<const Halfspace> halfspaces, std::span<const Plane> equalities) {
  std::vector<const Halfspace*> cons;
  for (const auto& e : equalities) cons.push_back(&e);
  for (const auto& h : halfspaces) cons.push_back(&h);
  if (cons.empty()) return true;

  std::vector<Vec3> normals;
  for (const auto* c : cons) normals.push_back(c->normal);
  const int r = rank(normals);

  // A nonempty system has a minimal face, an affine subspace cut out by r
  // independent tight constraints and contained in the solution set. Try
  // one particular point per candidate subset.
  auto check = [&](const Point3& p) { return satisfies(halfspaces, equalities, p); };
  const size_t m = cons.size();
  Point3 p;
  if (r == 1) {
    for (const auto* c : cons) {
      Rat t = c->offset / dot(c->normal, c->normal);
      if (check(t * c->normal)) return true;
    }
    return false;
  }
  if (r == 2) {
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = i + 1; j < m; ++j) {
        Vec3 d = cross(cons[i]->normal, cons[j]->normal);
        if (d.is_zero()) continue;
        Plane through_origin(d, 0);
        if (solve3({cons[i], cons[j], &through_origin}, p) && check(p)) return true;
      }
    }
    return false;
  }
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      for (size_t k = j + 1; k < m; ++k)
        if (solve3({cons[i], cons[j], cons[k]}, p) && check(p)) return true;
  return false;
}

bool is_subset(const Body& p, const Body& q) {
  for (const auto& v : p.vertices())
    for (const auto& h : q.halfspaces())
      if (side(h, v) == Side::kPos) return false;
  return true;
}

bool boxes_separated(const Body& p, const Body& q) {
  for (int i = 0; i < 3; ++i)
    if (p.upper()[i] < q.lower()[i] || q.upper()[i] < p.lower()[i]) return true;
  return false;
}

namespace {

void add_contained_vertices(const Body& from, const Body& in, std::vector<Point3>& out) {
  for (const auto& v : from.vertices())
    if (in.polytope().contains(v)) out.push_back(v);
}

void add_edge_crossings(const Body& edges_of, const Body& planes_of, std::vector<Point3>& out) {
  const auto& verts = edges_of.vertices();
  for (const auto& h : planes_of.halfspaces()) {
    std::vector<Rat> slack(verts.size());
    for (size_t v = 0; v < verts.size(); ++v) slack[v] = dot(h.normal, verts[v]) - h.offset;
    for (const auto& e : edges_of.edges()) {
      const Rat& su = slack[e.from];
      const Rat& sv = slack[e.to];
      if (sgn(su) * sgn(sv) >= 0) continue;
      Rat t = su / (su - sv);
      Point3 x = verts[e.from] + t * (verts[e.to] - verts[e.from]);
      if (planes_of.polytope().contains(x)) out.push_back(std::move(x));
    }
  }
}

}  // namespace

std::vector<Point3> intersection_vertices(const Body& p, const Body& q) {
  std::vector<Point3> out;
  if (boxes_separated(p, q)) return out;
  add_contained_vertices(p, q, out);
  add_contained_vertices(q, p, out);
  add_edge_crossings(p, q, out);
  add_edge_crossings(q, p, out);
  dedupe(out);
  return out;
}

}  // namespace topo9im
