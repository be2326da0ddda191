#include "topo9im/setops.hpp"

#include <cctype>

#include "topo9im/error.hpp"

namespace topo9im {

struct SetExpr::Node {
  Kind kind;
  std::shared_ptr<const Body> body;
  LeafMode mode = LeafMode::kClosed;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

bool SetExpr::eval(const Node& n, const Point3& p) {
  switch (n.kind) {
    case Kind::kLeaf: {
      Location loc = classify_point(n.body->polytope(), p);
      switch (n.mode) {
        case LeafMode::kClosed: return loc != Location::kOut;
        case LeafMode::kInterior: return loc == Location::kIn;
        case LeafMode::kBoundary: return loc == Location::kOn;
      }
      return false;
    }
    case Kind::kComplement: return !eval(*n.lhs, p);
    case Kind::kUnion: return eval(*n.lhs, p) || eval(*n.rhs, p);
    case Kind::kIntersection: return eval(*n.lhs, p) && eval(*n.rhs, p);
    case Kind::kDifference: return eval(*n.lhs, p) && !eval(*n.rhs, p);
    case Kind::kSymDiff: return eval(*n.lhs, p) != eval(*n.rhs, p);
  }
  return false;
}

SetExpr SetExpr::leaf(std::shared_ptr<const Body> body, LeafMode mode) {
  return SetExpr(std::make_shared<const Node>(Node{Kind::kLeaf, std::move(body), mode, {}, {}}));
}

SetExpr SetExpr::interior(const SetExpr& e) {
  if (e.kind() != Kind::kLeaf) throw UnsupportedComposite("interior of a composite expression");
  // The boundary of a body has empty interior, which no leaf can express.
  if (e.mode() == LeafMode::kBoundary)
    throw UnsupportedComposite("interior of a boundary leaf is empty and not representable");
  return leaf(e.node_->body, LeafMode::kInterior);
}

SetExpr SetExpr::closure(const SetExpr& e) {
  if (e.kind() != Kind::kLeaf) throw UnsupportedComposite("closure of a composite expression");
  // The boundary is already closed; closing the interior restores the body.
  return leaf(e.node_->body, e.mode() == LeafMode::kBoundary ? LeafMode::kBoundary : LeafMode::kClosed);
}

SetExpr SetExpr::boundary(const SetExpr& e) {
  if (e.kind() != Kind::kLeaf) throw UnsupportedComposite("boundary of a composite expression");
  return leaf(e.node_->body, LeafMode::kBoundary);
}

SetExpr SetExpr::exterior(const SetExpr& e) { return complement(closure(e)); }

SetExpr SetExpr::complement(SetExpr e) {
  return SetExpr(std::make_shared<const Node>(Node{Kind::kComplement, nullptr, LeafMode::kClosed,
                                                   std::move(e.node_), nullptr}));
}

SetExpr SetExpr::binary(Kind kind, SetExpr a, SetExpr b) {
  return SetExpr(std::make_shared<const Node>(
      Node{kind, nullptr, LeafMode::kClosed, std::move(a.node_), std::move(b.node_)}));
}

SetExpr SetExpr::unite(SetExpr a, SetExpr b) { return binary(Kind::kUnion, std::move(a), std::move(b)); }
SetExpr SetExpr::intersection(SetExpr a, SetExpr b) {
  return binary(Kind::kIntersection, std::move(a), std::move(b));
}
SetExpr SetExpr::difference(SetExpr a, SetExpr b) {
  return binary(Kind::kDifference, std::move(a), std::move(b));
}
SetExpr SetExpr::symdiff(SetExpr a, SetExpr b) { return binary(Kind::kSymDiff, std::move(a), std::move(b)); }

bool SetExpr::member(const Point3& p) const { return eval(*node_, p); }

SetExpr::Kind SetExpr::kind() const { return node_->kind; }
LeafMode SetExpr::mode() const { return node_->mode; }
const Body& SetExpr::body() const { return *node_->body; }

std::string SetExpr::to_string() const {
  const Node& n = *node_;
  auto sub = [](const std::shared_ptr<const Node>& child) { return SetExpr(child).to_string(); };
  switch (n.kind) {
    case Kind::kLeaf: {
      std::string name = "body@" + topo9im::to_string(n.body->vertices().front());
      switch (n.mode) {
        case LeafMode::kClosed: return name;
        case LeafMode::kInterior: return "I(" + name + ")";
        case LeafMode::kBoundary: return "B(" + name + ")";
      }
      return name;
    }
    case Kind::kComplement: return "comp(" + sub(n.lhs) + ")";
    case Kind::kUnion: return "union(" + sub(n.lhs) + "," + sub(n.rhs) + ")";
    case Kind::kIntersection: return "inter(" + sub(n.lhs) + "," + sub(n.rhs) + ")";
    case Kind::kDifference: return "diff(" + sub(n.lhs) + "," + sub(n.rhs) + ")";
    case Kind::kSymDiff: return "symdiff(" + sub(n.lhs) + "," + sub(n.rhs) + ")";
  }
  return {};
}

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, const BodyBindings& bodies) : text_(text), bodies_(bodies) {}

  SetExpr parse() {
    SetExpr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("set expression: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ident() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  bool at_call() {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == '(';
  }

  SetExpr expr() {
    std::string name = ident();
    if (!at_call()) {
      auto it = bodies_.find(name);
      if (it == bodies_.end()) fail("unbound body '" + name + "'");
      return SetExpr::leaf(it->second);
    }
    expect('(');
    SetExpr first = expr();
    if (name == "I" || name == "B" || name == "C" || name == "comp") {
      expect(')');
      if (name == "I") return SetExpr::interior(first);
      if (name == "B") return SetExpr::boundary(first);
      if (name == "C") return SetExpr::closure(first);
      return SetExpr::complement(std::move(first));
    }
    expect(',');
    SetExpr second = expr();
    expect(')');
    if (name == "union") return SetExpr::unite(std::move(first), std::move(second));
    if (name == "inter") return SetExpr::intersection(std::move(first), std::move(second));
    if (name == "diff") return SetExpr::difference(std::move(first), std::move(second));
    if (name == "symdiff") return SetExpr::symdiff(std::move(first), std::move(second));
    fail("unknown operator '" + name + "'");
  }

  std::string_view text_;
  const BodyBindings& bodies_;
  size_t pos_ = 0;
};

}  // namespace

SetExpr parse_set_expr(std::string_view text, const BodyBindings& bodies) {
  return ExprParser(text, bodies).parse();
}

}  // namespace topo9im
