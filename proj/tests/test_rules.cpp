#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "topo9im/error.hpp"
#include "topo9im/rules.hpp"

namespace topo9im {
namespace {

using testing::Box;

Box box(Rat x0, Rat y0, Rat z0, Rat x1, Rat y1, Rat z1) { return {Point3(x0, y0, z0), Point3(x1, y1, z1)}; }

struct World {
  KnowledgeBase kb;
  GeometryRegistry registry;

  World() { preload_topo_vocabulary(kb); }

  void add(const std::string& id, const std::string& cls, const Box& b) {
    kb.assert_class(id, cls);
    registry.add(id, b.body());
  }
};

const char* kRailRule = "Building(?b) ^ Railway(?r) ^ swrlb_topo:overlaps(?b,?r) -> RailStation(?b)";
const char* kWindowRule =
    "Wall(?x) ^ Geometry(?y) ^ swrlb_topo:inside(?y,?x) ^ haslength(?y,?l) ^ swrlb:lessThan(?l,2) -> Window(?y)";
const char* kComposition = "topo:meets(?a,?b) ^ topo:contains(?b,?c) -> topo:disjoint(?a,?c)";

TEST(Parse, RailStationRule) {
  auto rules = parse_program(kRailRule);
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].body.size(), 3u);
  EXPECT_EQ(rules[0].head.size(), 1u);
  EXPECT_EQ(rules[0].body[2].kind, Atom::Kind::kTopo);
  EXPECT_EQ(rules[0].body[2].relation, TopoRelation::kOverlaps);
  EXPECT_FALSE(rules[0].is_query());
}

TEST(Parse, WindowRuleAndQuery) {
  auto rules = parse_program(kWindowRule);
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].body[4].kind, Atom::Kind::kCompare);
  EXPECT_EQ(rules[0].body[4].comparison, Comparison::kLessThan);
  EXPECT_EQ(rules[0].body[4].args[1].literal, Literal(Rat(2)));

  auto query = parse_program("Geometry(?y) ^ swrlb_topo:meets(elem113,?y) -> sqwrl:select(?y)");
  ASSERT_EQ(query.size(), 1u);
  EXPECT_TRUE(query[0].is_query());
  EXPECT_EQ(query[0].body[1].args[0].kind, Term::Kind::kIndividual);
}

TEST(Parse, UnicodeConnectivesCommentsAndCase) {
  auto rules = parse_program(
      "# two rules\n"
      "Building(?b) ∧ Railway(?r) ∧ SWRLB_TOPO:Overlaps(?b, ?r) → RailStation(?b);\n"
      "A(?x) ^ haslength(?x, 2.5) -> B(?x)  # trailing\n");
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].body[2].name, "swrlb_topo:overlaps");
  EXPECT_EQ(rules[1].body[1].args[1].literal, Literal(Rat(5, 2)));
  EXPECT_TRUE(parse_program("").empty());
  EXPECT_EQ(parse_program("A(?x) -> B(?x); A(?x) -> C(?x);").size(), 2u);
}

TEST(Parse, Errors) {
  try {
    parse_program("A(?x) ^\n  B(?x -> C(?x)");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 8);
  }
  EXPECT_THROW(parse_program("A(?x) -> B(?y)"), SafetyError);
  EXPECT_THROW(parse_program("A(?x) -> sqwrl:select(?y)"), SafetyError);
  EXPECT_THROW(parse_program("A(?x) ^ swrlb:lessThan(?z, 2) -> B(?x)"), SafetyError);
  EXPECT_THROW(parse_program("A(?x) ^ swrlb_topo:touches(?x, ?y) -> B(?x)"), UnknownBuiltin);
  EXPECT_THROW(parse_program("A(?x) ^ swrlb:between(?x, 1, 2) -> B(?x)"), UnknownBuiltin);
  EXPECT_THROW(parse_program("A(?x) -> swrlb_topo:meets(?x, ?x)"), SyntaxError);
  EXPECT_THROW(parse_program("A(?x) -> B(?x) ^ sqwrl:select(?x)"), SyntaxError);
  EXPECT_THROW(parse_program("swrlb_topo:meets(?x) -> B(?x)"), SyntaxError);
  EXPECT_THROW(parse_program("A(?x) B(?x)"), SyntaxError);
  EXPECT_THROW(parse_program("A(\"unterminated) -> B(a)"), SyntaxError);
}

TEST(Run, RailStation) {
  World w;
  w.add("station", "Building", box(0, 0, 0, 2, 2, 2));
  w.add("shed", "Building", box(10, 0, 0, 11, 1, 1));
  w.add("track", "Railway", box(1, 1, 0, 6, Rat(3, 2), 1));
  ASSERT_EQ(compute_matrix(w.registry.at("station"), w.registry.at("track")).to_string(), "TTTTTTTTT");
  RunReport report = run(w.kb, w.registry, parse_program(kRailRule));
  EXPECT_TRUE(w.kb.has_class("station", "RailStation"));
  EXPECT_FALSE(w.kb.has_class("shed", "RailStation"));
  EXPECT_FALSE(w.kb.has_class("track", "RailStation"));
  EXPECT_EQ(w.kb.instances("RailStation").size(), 1u);
  // The successful builtin enriches the knowledge base in both directions.
  EXPECT_TRUE(w.kb.has_triple("station", "topo:overlaps", "track"));
  EXPECT_TRUE(w.kb.has_triple("track", "topo:overlaps", "station"));
  EXPECT_GE(report.enriched, 1u);
}

TEST(Run, WindowShortAndLong) {
  World w;
  w.add("wall", "Wall", box(0, 0, 0, 10, 1, 5));
  w.add("short", "Geometry", box(1, Rat(1, 4), 1, Rat(5, 2), Rat(3, 4), 2));
  w.add("long", "Geometry", box(3, Rat(1, 4), 1, 8, Rat(3, 4), 2));
  w.add("outside", "Geometry", box(20, 0, 0, Rat(41, 2), 1, 1));
  w.kb.assert_data("short", "haslength", Literal(Rat(3, 2)));
  w.kb.assert_data("long", "haslength", Literal(Rat(5)));
  w.kb.assert_data("outside", "haslength", Literal(Rat(1, 2)));
  run(w.kb, w.registry, parse_program(kWindowRule));
  EXPECT_TRUE(w.kb.has_class("short", "Window"));
  EXPECT_FALSE(w.kb.has_class("long", "Window"));
  EXPECT_FALSE(w.kb.has_class("outside", "Window"));
  EXPECT_TRUE(w.kb.has_triple("long", "topo:inside", "wall"));
  EXPECT_TRUE(w.kb.has_triple("wall", "topo:contains", "short"));
}

TEST(Run, CompositionRuleIsSound) {
  World w;
  w.add("a", "Thing", box(0, 1, 1, 1, 2, 2));
  w.add("b", "Thing", box(1, 0, 0, 4, 3, 3));
  w.add("c", "Thing", box(2, 1, 1, 3, 2, 2));
  auto assert_rel = [&](const std::string& x, const std::string& y) {
    TopoRelation r = relate(w.registry.at(x), w.registry.at(y));
    w.kb.assert_triple(x, topo_property(r), y);
    return r;
  };
  ASSERT_EQ(assert_rel("a", "b"), TopoRelation::kMeets);
  ASSERT_EQ(assert_rel("b", "c"), TopoRelation::kContains);
  ASSERT_FALSE(w.kb.has_triple("a", "topo:disjoint", "c"));
  RunReport report = run(w.kb, w.registry, parse_program(kComposition));
  EXPECT_TRUE(w.kb.has_triple("a", "topo:disjoint", "c"));
  EXPECT_TRUE(w.kb.has_triple("c", "topo:disjoint", "a"));
  EXPECT_EQ(relate(w.registry.at("a"), w.registry.at("c")), TopoRelation::kDisjoint);
  EXPECT_EQ(report.geometry_evaluations, 0u);
}

TEST(Run, MeetsQueryOnCanonicalSuite) {
  World w;
  Box unit = box(0, 0, 0, 1, 1, 1);
  std::vector<std::string> expected;
  for (const auto& nb : testing::canonical_suite()) {
    w.add(nb.name, "Geometry", nb.box);
    if (nb.name != "u" && classify(testing::grid_oracle(unit, nb.box)) == TopoRelation::kMeets)
      expected.push_back(nb.name);
  }
  ASSERT_EQ(expected, (std::vector<std::string>{"face", "edge", "vertex"}));
  std::sort(expected.begin(), expected.end());
  RunReport report = run(w.kb, w.registry, parse_program("swrlb_topo:meets(u,?y) -> sqwrl:select(?y)"));
  ASSERT_EQ(report.queries.size(), 1u);
  EXPECT_EQ(report.queries[0].columns, (std::vector<std::string>{"?y"}));
  std::vector<std::string> got;
  for (const auto& row : report.queries[0].rows) got.push_back(row.at(0));
  EXPECT_EQ(got, expected);
}

TEST(Run, QueryOverDataAndJoins) {
  World w;
  w.add("wall", "Wall", box(0, 0, 0, 10, 1, 5));
  w.add("g1", "Geometry", box(1, Rat(1, 4), 1, 2, Rat(3, 4), 2));
  w.add("g2", "Geometry", box(4, Rat(1, 4), 1, 5, Rat(3, 4), 2));
  w.kb.assert_data("g1", "haslength", Literal(Rat(1)));
  w.kb.assert_data("g2", "haslength", Literal(Rat(7, 2)));
  RunReport report = run(w.kb, w.registry,
                         parse_program("Geometry(?y) ^ haslength(?y, ?l) ^ swrlb:greaterThan(?l, 1) ^ "
                                       "swrlb_topo:inside(?y, ?w) -> sqwrl:select(?y, ?w, ?l)"));
  ASSERT_EQ(report.queries.size(), 1u);
  ASSERT_EQ(report.queries[0].rows.size(), 1u);
  EXPECT_EQ(report.queries[0].rows[0], (std::vector<std::string>{"g2", "wall", "7/2"}));
  auto eq = run(w.kb, w.registry, parse_program("haslength(?y, 1) -> sqwrl:select(?y)"));
  EXPECT_EQ(eq.queries[0].rows, (std::vector<std::vector<std::string>>{{"g1"}}));
}

TEST(Run, Errors) {
  World w;
  w.add("u", "Geometry", box(0, 0, 0, 1, 1, 1));
  w.kb.assert_class("ghost", "Geometry");
  EXPECT_THROW(run(w.kb, w.registry, parse_program("Geometry(?x) ^ swrlb_topo:meets(?x, u) -> Near(?x)")),
               MissingGeometry);
  World t;
  t.add("u", "Geometry", box(0, 0, 0, 1, 1, 1));
  t.kb.assert_data("u", "label", Literal(std::string("tall")));
  EXPECT_THROW(run(t.kb, t.registry, parse_program("label(?x, ?v) ^ swrlb:lessThan(?v, 2) -> Short(?x)")),
               TypeError);
}

// A scene with a few classes and a multi-rule program for the property
// checks below.
struct Fixture {
  World world;
  std::vector<Rule> rules;

  explicit Fixture(unsigned seed) {
    std::mt19937 rng(seed);
    const char* classes[] = {"Building", "Railway", "Wall", "Geometry"};
    for (int i = 0; i < 8; ++i) {
      auto [a, unused] = testing::random_box_pair(rng);
      std::string id = "b" + std::to_string(i);
      world.add(id, classes[i % 4], a);
      world.kb.assert_data(id, "haslength", Literal(Rat(i, 2)));
    }
    rules = parse_program(std::string(kRailRule) + ";\n" + kWindowRule + ";\n" + kComposition +
                          ";\n"
                          "Building(?x) ^ swrlb_topo:meets(?x, ?y) -> adjacentTo(?x, ?y);\n"
                          "adjacentTo(?x, ?y) ^ Wall(?y) -> Exterior(?x);\n"
                          "Geometry(?g) ^ swrlb_topo:coveredBy(?g, ?h) -> Partial(?g);\n"
                          "Geometry(?y) -> sqwrl:select(?y);\n");
  }
};

TEST(RunProperties, MemoizationIsTransparent) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Fixture a(seed), b(seed);
    RunReport ra = run(a.world.kb, a.world.registry, a.rules, {.memoize = true});
    RunReport rb = run(b.world.kb, b.world.registry, b.rules, {.memoize = false});
    EXPECT_EQ(a.world.kb, b.world.kb);
    ASSERT_EQ(ra.queries.size(), rb.queries.size());
    EXPECT_EQ(ra.queries[0].rows, rb.queries[0].rows);
    EXPECT_LE(ra.geometry_evaluations, rb.geometry_evaluations);
  }
}

TEST(RunProperties, RuleOrderDoesNotMatter) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Fixture base(seed);
    run(base.world.kb, base.world.registry, base.rules);
    std::vector<size_t> order(base.rules.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937 rng(seed);
    for (int k = 0; k < 4; ++k) {
      std::shuffle(order.begin(), order.end(), rng);
      Fixture other(seed);
      run(other.world.kb, other.world.registry, other.rules, {.rule_order = order});
      EXPECT_EQ(other.world.kb, base.world.kb);
    }
  }
}

TEST(RunProperties, BuiltinSoundnessAndDerivationBound) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Fixture f(seed);
    KnowledgeBase& kb = f.world.kb;
    RunReport report = run(kb, f.world.registry, f.rules);
    size_t n = kb.individuals().size();
    size_t bound = (kb.properties().size() + kb.classes().size()) * n * n;
    EXPECT_LE(report.derived + report.enriched + report.materialized, bound);
    // Every topo triple between bodies is the geometric relation of the pair.
    for (const auto& t : kb.triples()) {
      auto r = relation_of_property(t.property);
      if (!r) continue;
      const Body* a = f.world.registry.find(t.subject);
      const Body* b = f.world.registry.find(t.object);
      ASSERT_TRUE(a && b);
      EXPECT_EQ(relate(*a, *b), *r) << t.subject << " " << t.property << " " << t.object;
    }
    EXPECT_TRUE(check_consistency(kb).empty());
    // A second run over the enriched knowledge base adds nothing.
    RunReport again = run(kb, f.world.registry, f.rules);
    EXPECT_EQ(again.derived + again.enriched + again.materialized, 0u);
  }
}

}  // namespace
}  // namespace topo9im
