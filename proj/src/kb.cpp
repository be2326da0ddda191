#include "topo9im/kb.hpp"

#include <algorithm>
#include <sstream>

#include "topo9im/error.hpp"

namespace topo9im {

namespace {

const std::set<std::string> kNoNames;
const std::set<Literal> kNoLiterals;
const KnowledgeBase::Index kNoIndex;

std::string_view namespace_of(std::string_view name) {
  auto colon = name.find(':');
  return colon == std::string_view::npos ? std::string_view{} : name.substr(0, colon + 1);
}

}  // namespace

std::string_view characteristic_name(Characteristic c) {
  switch (c) {
    case Characteristic::kSymmetric: return "Symmetric";
    case Characteristic::kAsymmetric: return "Asymmetric";
    case Characteristic::kTransitive: return "Transitive";
    case Characteristic::kReflexive: return "Reflexive";
    case Characteristic::kIrreflexive: return "Irreflexive";
    case Characteristic::kFunctional: return "Functional";
  }
  return "";
}

std::optional<Characteristic> characteristic_from_name(std::string_view name) {
  for (auto c : {Characteristic::kSymmetric, Characteristic::kAsymmetric, Characteristic::kTransitive,
                 Characteristic::kReflexive, Characteristic::kIrreflexive, Characteristic::kFunctional})
    if (characteristic_name(c) == name) return c;
  return std::nullopt;
}

bool operator==(const Literal& a, const Literal& b) {
  if (a.is_number() != b.is_number()) return false;
  return a.is_number() ? a.number() == b.number() : a.text() == b.text();
}

bool operator<(const Literal& a, const Literal& b) {
  if (a.is_number() != b.is_number()) return a.is_number();
  return a.is_number() ? a.number() < b.number() : a.text() < b.text();
}

void KnowledgeBase::declare_class(const std::string& name) { state_.classes.insert(name); }

void KnowledgeBase::declare_individual(const std::string& name) { state_.individuals.insert(name); }

void KnowledgeBase::declare_property(const PropertyDef& def) {
  if (def.has(Characteristic::kSymmetric) && def.has(Characteristic::kAsymmetric))
    throw VocabularyConflict(def.name + " cannot be both Symmetric and Asymmetric");
  if (def.has(Characteristic::kReflexive) && def.has(Characteristic::kIrreflexive))
    throw VocabularyConflict(def.name + " cannot be both Reflexive and Irreflexive");
  if (is_data_property(def.name))
    throw VocabularyConflict(def.name + " is already used as a data property");

  PropertyDef merged = def;
  if (auto it = state_.properties.find(def.name); it != state_.properties.end()) {
    // Partial declarations (e.g. one created as the far side of an inverse)
    // merge; differing non-empty characteristic sets or inverses conflict.
    const PropertyDef& cur = it->second;
    if (!cur.characteristics.empty() && !def.characteristics.empty() &&
        cur.characteristics != def.characteristics)
      throw VocabularyConflict("conflicting characteristics for " + def.name);
    if (cur.inverse_of && def.inverse_of && *cur.inverse_of != *def.inverse_of)
      throw VocabularyConflict("conflicting inverse for " + def.name);
    if (merged.characteristics.empty()) merged.characteristics = cur.characteristics;
    if (!merged.inverse_of) merged.inverse_of = cur.inverse_of;
  }
  if (merged.inverse_of) {
    if (const PropertyDef* other = property(*merged.inverse_of);
        other && other->inverse_of && *other->inverse_of != merged.name)
      throw VocabularyConflict(merged.name + " inverse of " + *merged.inverse_of +
                               ", which is already inverse of " + *other->inverse_of);
    if (is_data_property(*merged.inverse_of))
      throw VocabularyConflict(*merged.inverse_of + " is already used as a data property");
  }
  state_.properties[merged.name] = merged;
  if (merged.inverse_of) {
    PropertyDef& other = state_.properties[*merged.inverse_of];
    other.name = *merged.inverse_of;
    other.inverse_of = merged.name;
  }
}

bool KnowledgeBase::assert_class(const std::string& individual, const std::string& cls) {
  declare_individual(individual);
  declare_class(cls);
  if (!state_.members[cls].insert(individual).second) return false;
  state_.types[individual].insert(cls);
  log_.push_back({Fact::Kind::kClass, individual, cls, {}});
  return true;
}

bool KnowledgeBase::assert_triple(const std::string& subject, const std::string& property,
                                  const std::string& object) {
  if (!state_.properties.contains(property)) throw Error("undeclared property " + property);
  declare_individual(subject);
  declare_individual(object);
  if (!state_.forward[property][subject].insert(object).second) return false;
  state_.backward[property][object].insert(subject);
  ++state_.triple_count;
  log_.push_back({Fact::Kind::kTriple, subject, property, object});
  return true;
}

bool KnowledgeBase::assert_data(const std::string& subject, const std::string& property, const Literal& value) {
  if (state_.properties.contains(property))
    throw VocabularyConflict(property + " is declared as an object property");
  declare_individual(subject);
  return state_.data[property][subject].insert(value).second;
}

void KnowledgeBase::set_geometry_source(const std::string& individual, const std::string& path) {
  declare_individual(individual);
  state_.geometry[individual] = path;
}

std::optional<std::string> KnowledgeBase::geometry_source(const std::string& individual) const {
  auto it = state_.geometry.find(individual);
  if (it == state_.geometry.end()) return std::nullopt;
  return it->second;
}

const PropertyDef* KnowledgeBase::property(std::string_view name) const {
  auto it = state_.properties.find(std::string(name));
  return it == state_.properties.end() ? nullptr : &it->second;
}

bool KnowledgeBase::is_data_property(std::string_view name) const {
  return state_.data.contains(std::string(name));
}

bool KnowledgeBase::has_class(const std::string& individual, const std::string& cls) const {
  auto it = state_.types.find(individual);
  return it != state_.types.end() && it->second.contains(cls);
}

const std::set<std::string>& KnowledgeBase::instances(const std::string& cls) const {
  auto it = state_.members.find(cls);
  return it == state_.members.end() ? kNoNames : it->second;
}

const std::set<std::string>& KnowledgeBase::classes_of(const std::string& individual) const {
  auto it = state_.types.find(individual);
  return it == state_.types.end() ? kNoNames : it->second;
}

bool KnowledgeBase::has_triple(const std::string& s, const std::string& p, const std::string& o) const {
  const Index& idx = forward(p);
  auto it = idx.find(s);
  return it != idx.end() && it->second.contains(o);
}

const KnowledgeBase::Index& KnowledgeBase::forward(const std::string& property) const {
  auto it = state_.forward.find(property);
  return it == state_.forward.end() ? kNoIndex : it->second;
}

const KnowledgeBase::Index& KnowledgeBase::backward(const std::string& property) const {
  auto it = state_.backward.find(property);
  return it == state_.backward.end() ? kNoIndex : it->second;
}

std::vector<Triple> KnowledgeBase::triples() const {
  std::vector<Triple> out;
  out.reserve(state_.triple_count);
  for (const auto& [p, idx] : state_.forward)
    for (const auto& [s, objects] : idx)
      for (const auto& o : objects) out.push_back({s, p, o});
  std::sort(out.begin(), out.end());
  return out;
}

size_t KnowledgeBase::triple_count() const { return state_.triple_count; }

const std::set<Literal>& KnowledgeBase::data_values(const std::string& subject, const std::string& property) const {
  auto p = state_.data.find(property);
  if (p == state_.data.end()) return kNoLiterals;
  auto s = p->second.find(subject);
  return s == p->second.end() ? kNoLiterals : s->second;
}

std::string topo_property(TopoRelation r) { return std::string(kTopoPrefix) + std::string(relation_name(r)); }

std::optional<TopoRelation> relation_of_property(std::string_view property) {
  if (!property.starts_with(kTopoPrefix)) return std::nullopt;
  return relation_from_name(property.substr(kTopoPrefix.size()));
}

void preload_topo_vocabulary(KnowledgeBase& kb) {
  using C = Characteristic;
  auto prop = [](TopoRelation r, std::set<C> chars, std::optional<TopoRelation> inverse = std::nullopt) {
    PropertyDef def{topo_property(r), std::move(chars), std::nullopt};
    if (inverse) def.inverse_of = topo_property(*inverse);
    return def;
  };
  kb.declare_property(prop(TopoRelation::kDisjoint, {C::kSymmetric, C::kIrreflexive}));
  kb.declare_property(prop(TopoRelation::kMeets, {C::kSymmetric, C::kIrreflexive}));
  kb.declare_property(prop(TopoRelation::kOverlaps, {C::kSymmetric, C::kIrreflexive}));
  kb.declare_property(prop(TopoRelation::kEquals, {C::kTransitive, C::kSymmetric, C::kReflexive}));
  kb.declare_property(prop(TopoRelation::kInside, {C::kTransitive, C::kAsymmetric, C::kIrreflexive},
                           TopoRelation::kContains));
  kb.declare_property(prop(TopoRelation::kContains, {C::kTransitive, C::kAsymmetric, C::kIrreflexive},
                           TopoRelation::kInside));
  kb.declare_property(prop(TopoRelation::kCovers, {C::kAsymmetric, C::kIrreflexive}, TopoRelation::kCoveredBy));
  kb.declare_property(prop(TopoRelation::kCoveredBy, {C::kAsymmetric, C::kIrreflexive}, TopoRelation::kCovers));
}

size_t materialize(KnowledgeBase& kb) {
  size_t added = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    auto add = [&](const std::string& s, const std::string& p, const std::string& o) {
      if (kb.assert_triple(s, p, o)) {
        ++added;
        changed = true;
      }
    };
    for (const auto& [name, def] : kb.properties()) {
      // Copy: assertions below may grow the index being walked.
      const KnowledgeBase::Index pairs = kb.forward(name);
      for (const auto& [s, objects] : pairs) {
        for (const auto& o : objects) {
          if (def.has(Characteristic::kSymmetric)) add(o, name, s);
          if (def.inverse_of) add(o, *def.inverse_of, s);
          if (def.has(Characteristic::kTransitive)) {
            auto next = pairs.find(o);
            if (next == pairs.end()) continue;
            for (const auto& t : next->second) add(s, name, t);
          }
        }
      }
      if (def.has(Characteristic::kReflexive)) {
        std::set<std::string> participants;
        std::string_view ns = namespace_of(name);
        for (const auto& [other, unused] : kb.properties()) {
          if (namespace_of(other) != ns) continue;
          for (const auto& [s, objects] : kb.forward(other)) {
            participants.insert(s);
            participants.insert(objects.begin(), objects.end());
          }
        }
        for (const auto& x : participants) add(x, name, x);
      }
    }
  }
  return added;
}

std::string Violation::to_string() const {
  std::string out = std::string(characteristic_name(characteristic)) + " violated by " + property + "(";
  for (size_t i = 0; i < individuals.size(); ++i) out += (i ? ", " : "") + individuals[i];
  return out + ")";
}

std::vector<Violation> check_consistency(const KnowledgeBase& kb) {
  std::vector<Violation> out;
  for (const auto& [name, def] : kb.properties()) {
    const auto& pairs = kb.forward(name);
    for (const auto& [s, objects] : pairs) {
      if (def.has(Characteristic::kIrreflexive) && objects.contains(s))
        out.push_back({Characteristic::kIrreflexive, name, {s}});
      if (def.has(Characteristic::kAsymmetric)) {
        for (const auto& o : objects)
          if (s < o && kb.has_triple(o, name, s)) out.push_back({Characteristic::kAsymmetric, name, {s, o}});
      }
      if (def.has(Characteristic::kFunctional) && objects.size() > 1) {
        std::vector<std::string> who{s};
        who.insert(who.end(), objects.begin(), objects.end());
        out.push_back({Characteristic::kFunctional, name, std::move(who)});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.property, a.individuals, a.characteristic) <
           std::tie(b.property, b.individuals, b.characteristic);
  });
  return out;
}

namespace {

nlohmann::json literal_json(const Literal& l) {
  if (l.is_number()) return {{"number", to_string(l.number())}};
  return {{"string", l.text()}};
}

Literal literal_from_json(const nlohmann::json& j) {
  if (j.contains("number")) return Literal(parse_rational(j.at("number").get<std::string>()));
  return Literal(j.at("string").get<std::string>());
}

}  // namespace

nlohmann::json to_json(const KnowledgeBase& kb) {
  using nlohmann::json;
  json doc = json::object();
  doc["classes"] = json(kb.classes());

  json props = json::array();
  for (const auto& [name, def] : kb.properties()) {
    json chars = json::array();
    for (Characteristic c : def.characteristics) chars.push_back(characteristic_name(c));
    props.push_back({{"name", name},
                     {"characteristics", chars},
                     {"inverse_of", def.inverse_of ? json(*def.inverse_of) : json(nullptr)}});
  }
  doc["properties"] = props;

  json inds = json::array();
  for (const auto& name : kb.individuals()) {
    json ind = {{"name", name}, {"classes", json(kb.classes_of(name))}};
    json attrs = json::object();
    for (const auto& [prop, subjects] : kb.data()) {
      auto it = subjects.find(name);
      if (it == subjects.end()) continue;
      json values = json::array();
      for (const auto& v : it->second) values.push_back(literal_json(v));
      attrs[prop] = values;
    }
    ind["attributes"] = attrs;
    if (auto geom = kb.geometry_source(name)) ind["geometry"] = *geom;
    inds.push_back(ind);
  }
  doc["individuals"] = inds;

  json triples = json::array();
  for (const auto& t : kb.triples()) triples.push_back({t.subject, t.property, t.object});
  doc["triples"] = triples;
  return doc;
}

KnowledgeBase kb_from_json(const nlohmann::json& doc) {
  KnowledgeBase kb;
  try {
    for (const auto& c : doc.at("classes")) kb.declare_class(c.get<std::string>());
    for (const auto& p : doc.at("properties")) {
      PropertyDef def{p.at("name").get<std::string>(), {}, std::nullopt};
      for (const auto& c : p.at("characteristics")) {
        auto ch = characteristic_from_name(c.get<std::string>());
        if (!ch) throw ParseError("unknown characteristic " + c.dump());
        def.characteristics.insert(*ch);
      }
      if (p.contains("inverse_of") && !p.at("inverse_of").is_null())
        def.inverse_of = p.at("inverse_of").get<std::string>();
      kb.declare_property(def);
    }
    for (const auto& ind : doc.at("individuals")) {
      const auto name = ind.at("name").get<std::string>();
      kb.declare_individual(name);
      for (const auto& c : ind.at("classes")) kb.assert_class(name, c.get<std::string>());
      if (ind.contains("attributes"))
        for (const auto& [prop, values] : ind.at("attributes").items())
          for (const auto& v : values) kb.assert_data(name, prop, literal_from_json(v));
      if (ind.contains("geometry")) kb.set_geometry_source(name, ind.at("geometry").get<std::string>());
    }
    for (const auto& t : doc.at("triples")) {
      if (!t.is_array() || t.size() != 3) throw ParseError("triple must be a 3-element array: " + t.dump());
      kb.assert_triple(t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("knowledge base document: ") + e.what());
  }
  return kb;
}

namespace {

std::string iri(std::string_view name) {
  if (name.starts_with(kTopoPrefix))
    return "<" + std::string(kTopoBaseIri) + std::string(name.substr(kTopoPrefix.size())) + ">";
  return "<" + std::string(name) + ">";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_ntriples(const KnowledgeBase& kb) {
  static constexpr std::string_view kRdfType = "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>";
  std::ostringstream out;
  for (const auto& ind : kb.individuals())
    for (const auto& cls : kb.classes_of(ind)) out << iri(ind) << ' ' << kRdfType << ' ' << iri(cls) << " .\n";
  for (const auto& t : kb.triples())
    out << iri(t.subject) << ' ' << iri(t.property) << ' ' << iri(t.object) << " .\n";
  for (const auto& [prop, subjects] : kb.data())
    for (const auto& [s, values] : subjects)
      for (const auto& v : values) out << iri(s) << ' ' << iri(prop) << ' ' << quoted(v.to_string()) << " .\n";
  return out.str();
}

}  // namespace topo9im
