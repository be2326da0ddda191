#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "topo9im/kb.hpp"
#include "topo9im/registry.hpp"

namespace topo9im {

struct SourcePos {
  int line = 1;
  int column = 1;
};

struct Term {
  enum class Kind { kVariable, kIndividual, kLiteral };
  Kind kind;
  std::string name;  // variable name without '?', or individual name
  Literal literal;

  static Term variable(std::string name) { return {Kind::kVariable, std::move(name), {}}; }
  static Term individual(std::string name) { return {Kind::kIndividual, std::move(name), {}}; }
  static Term value(Literal l) { return {Kind::kLiteral, {}, std::move(l)}; }

  bool is_variable() const { return kind == Kind::kVariable; }
  std::string to_string() const;
};

enum class Comparison { kLessThan, kGreaterThan, kEqual };

struct Atom {
  enum class Kind {
    kClass,     // C(t)
    kProperty,  // p(t, t); resolved to kData at run time when p is a data property
    kData,      // p(t, literal-or-variable)
    kTopo,      // swrlb_topo:R(t, t)
    kCompare,   // swrlb:lessThan / greaterThan / equal
    kSelect,    // sqwrl:select(?v, ...)
  };
  Kind kind;
  std::string name;  // as written for class/property/data; normalized for builtins
  std::vector<Term> args;
  SourcePos pos;
  TopoRelation relation = TopoRelation::kDisjoint;  // kTopo only
  Comparison comparison = Comparison::kEqual;        // kCompare only

  std::string to_string() const;
};

struct Rule {
  std::vector<Atom> body;
  std::vector<Atom> head;
  SourcePos pos;

  bool is_query() const { return head.size() == 1 && head.front().kind == Atom::Kind::kSelect; }
  std::string to_string() const;
};

// Grammar:
//   program := (rule ";")*          the final ';' may be omitted
//   rule    := atoms ("->" | "→") atoms
//   atoms   := atom (("^" | "∧") atom)*
//   atom    := ident "(" term ("," term)* ")"
//   term    := "?"ident | ident | number | string
// `#` starts a comment. Builtin prefixes (swrlb_topo:, swrlb:, sqwrl:) and
// builtin local names match case-insensitively.
//
// Throws SyntaxError, SafetyError (head or select variable, or comparison
// operand, not bound by the body) or UnknownBuiltin.
std::vector<Rule> parse_program(std::string_view text);

struct QueryResult {
  std::vector<std::string> columns;  // "?y", ...
  std::vector<std::vector<std::string>> rows;  // sorted, deduplicated
};

struct RunOptions {
  bool memoize = true;
  // Evaluation order of rules within a round; a permutation of indices, or
  // empty for source order. Exposed to test order independence.
  std::vector<size_t> rule_order;
};

struct RunReport {
  std::vector<QueryResult> queries;  // one per query, in program order
  size_t derived = 0;                // new facts asserted by rule heads
  size_t enriched = 0;               // new topo: triples from builtin successes
  size_t materialized = 0;           // triples added by characteristic closure
  size_t rounds = 0;
  size_t geometry_evaluations = 0;
};

// Semi-naive forward chaining to a fixpoint, interleaved with
// materialize() until neither adds anything; then the queries run. Every
// successful swrlb_topo builtin is also asserted as its topo: triple.
//
// Throws MissingGeometry when a topo builtin reaches an individual without
// a body, TypeError when lessThan/greaterThan sees a non-number.
RunReport run(KnowledgeBase& kb, const GeometryRegistry& registry, const std::vector<Rule>& rules,
              const RunOptions& options = {});

}  // namespace topo9im
