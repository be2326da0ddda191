#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "topo9im/polytope.hpp"

namespace topo9im {

enum class LeafMode { kClosed, kInterior, kBoundary };

// Boolean set expression over convex bodies. Interior, closure and boundary
// exist only as leaf modes: applying them to a composite expression throws
// UnsupportedComposite. Membership is decided pointwise and exactly.
class SetExpr {
 public:
  enum class Kind { kLeaf, kComplement, kUnion, kIntersection, kDifference, kSymDiff };

  static SetExpr leaf(std::shared_ptr<const Body> body, LeafMode mode = LeafMode::kClosed);

  static SetExpr interior(const SetExpr& e);
  static SetExpr closure(const SetExpr& e);
  static SetExpr boundary(const SetExpr& e);
  // Shorthand for the open exterior, complement(closure(e)).
  static SetExpr exterior(const SetExpr& e);

  static SetExpr complement(SetExpr e);
  static SetExpr unite(SetExpr a, SetExpr b);
  static SetExpr intersection(SetExpr a, SetExpr b);
  static SetExpr difference(SetExpr a, SetExpr b);
  static SetExpr symdiff(SetExpr a, SetExpr b);

  bool member(const Point3& p) const;

  Kind kind() const;
  // Leaf accessors; undefined for composites.
  LeafMode mode() const;
  const Body& body() const;

  std::string to_string() const;

 private:
  struct Node;
  explicit SetExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static SetExpr binary(Kind kind, SetExpr a, SetExpr b);
  static bool eval(const Node& n, const Point3& p);

  std::shared_ptr<const Node> node_;
};

using BodyBindings = std::map<std::string, std::shared_ptr<const Body>, std::less<>>;

// Textual form: an identifier is a closed leaf; I(e) B(e) C(e) comp(e)
// union(e,e) inter(e,e) diff(e,e) symdiff(e,e). Throws ParseError, or
// UnsupportedComposite from the leaf-only operators.
SetExpr parse_set_expr(std::string_view text, const BodyBindings& bodies);

}  // namespace topo9im
