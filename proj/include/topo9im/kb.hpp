#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "topo9im/exact_geom.hpp"
#include "topo9im/nineim.hpp"

namespace topo9im {

enum class Characteristic { kSymmetric, kAsymmetric, kTransitive, kReflexive, kIrreflexive, kFunctional };

std::string_view characteristic_name(Characteristic c);
std::optional<Characteristic> characteristic_from_name(std::string_view name);

struct PropertyDef {
  std::string name;
  std::set<Characteristic> characteristics;
  std::optional<std::string> inverse_of;

  bool has(Characteristic c) const { return characteristics.contains(c); }
  bool operator==(const PropertyDef&) const = default;
};

// Data value: an exact number or a string.
class Literal {
 public:
  Literal() = default;
  explicit Literal(Rat number) : value_(std::move(number)) {}
  explicit Literal(std::string text) : value_(std::move(text)) {}

  bool is_number() const { return std::holds_alternative<Rat>(value_); }
  const Rat& number() const { return std::get<Rat>(value_); }
  const std::string& text() const { return std::get<std::string>(value_); }

  std::string to_string() const { return is_number() ? topo9im::to_string(number()) : text(); }

  friend bool operator==(const Literal& a, const Literal& b);
  friend bool operator<(const Literal& a, const Literal& b);

 private:
  std::variant<std::string, Rat> value_;
};

struct Triple {
  std::string subject;
  std::string property;
  std::string object;

  auto operator<=>(const Triple&) const = default;
};

// An assertion in insertion order; the rule engine reads the tail of this
// log as the delta of each round.
struct Fact {
  enum class Kind { kClass, kTriple };
  Kind kind;
  std::string subject;   // the individual
  std::string property;  // class name for kClass
  std::string object;    // empty for kClass
};

// Classes, individuals, characteristic-annotated object properties, object
// triples and data triples. Assertions are set-valued: re-asserting a fact
// is a no-op that reports false.
class KnowledgeBase {
 public:
  using Index = std::map<std::string, std::set<std::string>>;

  void declare_class(const std::string& name);
  void declare_individual(const std::string& name);
  // Declaring an identical definition twice is fine. A differing definition
  // of an existing property, an inconsistent characteristic set, or an
  // inverse that disagrees with the other side throws VocabularyConflict.
  void declare_property(const PropertyDef& def);

  bool assert_class(const std::string& individual, const std::string& cls);
  // Throws Error if the property was never declared.
  bool assert_triple(const std::string& subject, const std::string& property, const std::string& object);
  bool assert_data(const std::string& subject, const std::string& property, const Literal& value);

  // Optional location of the individual's mesh, kept for persistence.
  void set_geometry_source(const std::string& individual, const std::string& path);
  std::optional<std::string> geometry_source(const std::string& individual) const;

  const std::set<std::string>& classes() const { return state_.classes; }
  const std::set<std::string>& individuals() const { return state_.individuals; }
  const std::map<std::string, PropertyDef>& properties() const { return state_.properties; }
  const PropertyDef* property(std::string_view name) const;
  bool is_data_property(std::string_view name) const;

  bool has_class(const std::string& individual, const std::string& cls) const;
  const std::set<std::string>& instances(const std::string& cls) const;
  const std::set<std::string>& classes_of(const std::string& individual) const;

  bool has_triple(const std::string& s, const std::string& p, const std::string& o) const;
  // subject -> objects for one property (empty if none).
  const Index& forward(const std::string& property) const;
  // object -> subjects.
  const Index& backward(const std::string& property) const;
  std::vector<Triple> triples() const;
  size_t triple_count() const;

  // property -> subject -> values.
  const std::map<std::string, std::map<std::string, std::set<Literal>>>& data() const { return state_.data; }
  const std::set<Literal>& data_values(const std::string& subject, const std::string& property) const;

  const std::vector<Fact>& log() const { return log_; }

  bool operator==(const KnowledgeBase& other) const { return state_ == other.state_; }

 private:
  struct State {
    std::set<std::string> classes;
    std::set<std::string> individuals;
    std::map<std::string, PropertyDef> properties;
    std::map<std::string, std::set<std::string>> members;  // class -> individuals
    std::map<std::string, std::set<std::string>> types;    // individual -> classes
    std::map<std::string, Index> forward;
    std::map<std::string, Index> backward;
    std::map<std::string, std::map<std::string, std::set<Literal>>> data;
    std::map<std::string, std::string> geometry;
    size_t triple_count = 0;

    bool operator==(const State&) const = default;
  };

  State state_;
  std::vector<Fact> log_;
};

inline constexpr std::string_view kTopoPrefix = "topo:";
inline constexpr std::string_view kTopoBaseIri = "http://topo9im.local/topo#";

// "topo:meets" etc.
std::string topo_property(TopoRelation r);
std::optional<TopoRelation> relation_of_property(std::string_view property);

// Declares the eight topo: properties with their characteristics and the
// inside/contains and covers/coveredBy inverse pairs.
//
// meets, inside and equals carry the base characteristics; the others
// follow from them: contains mirrors inside, covers/coveredBy are the
// non-strict counterparts (asymmetric, irreflexive, not transitive), and
// disjoint/overlaps are symmetric like meets.
void preload_topo_vocabulary(KnowledgeBase& kb);

// Closes the triples under symmetry, transitivity, inverses and
// reflexivity (a reflexive property gets (x,x) for every individual that
// appears in a triple of the same namespace). Returns the number of triples
// added; a second call returns 0.
size_t materialize(KnowledgeBase& kb);

struct Violation {
  Characteristic characteristic;
  std::string property;
  std::vector<std::string> individuals;

  std::string to_string() const;
  bool operator==(const Violation&) const = default;
};

// Irreflexive, asymmetric and functional violations, sorted.
std::vector<Violation> check_consistency(const KnowledgeBase& kb);

nlohmann::json to_json(const KnowledgeBase& kb);
KnowledgeBase kb_from_json(const nlohmann::json& doc);

// `<s> <p> <o> .` per line. Names with the topo: prefix expand to
// kTopoBaseIri; class memberships use rdf:type; data values become literals.
std::string to_ntriples(const KnowledgeBase& kb);

}  // namespace topo9im
