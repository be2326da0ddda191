#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "topo9im/error.hpp"
#include "topo9im/rules.hpp"
#include "topo9im/scene.hpp"

namespace topo9im {
namespace {

namespace fs = std::filesystem;

const fs::path kStation = fs::path(TOPO9IM_TEST_DATA) / "station";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string box_off(const testing::Box& b) {
  std::ostringstream out;
  out << "OFF\n8 0 0\n";
  for (int i = 0; i < 8; ++i)
    out << to_string((i & 1 ? b.hi : b.lo).x) << ' ' << to_string((i & 2 ? b.hi : b.lo).y) << ' '
        << to_string((i & 4 ? b.hi : b.lo).z) << '\n';
  return out.str();
}

// Fresh directory per test for manifests written on the fly.
class SceneDir : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("topo9im_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path manifest(const std::vector<std::pair<std::string, testing::Box>>& boxes, const std::string& extra = "") {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [id, b] : boxes) {
      spit(dir / (id + ".off"), box_off(b));
      entries.push_back({{"id", id}, {"class", "Geometry"}, {"geometry", id + ".off"}});
    }
    if (!extra.empty()) entries.push_back(nlohmann::json::parse(extra));
    fs::path p = dir / "manifest.json";
    spit(p, nlohmann::json{{"entries", entries}}.dump(2));
    return p;
  }

  fs::path suite_manifest() {
    std::vector<std::pair<std::string, testing::Box>> boxes;
    for (const auto& nb : testing::canonical_suite()) boxes.emplace_back(nb.name, nb.box);
    return manifest(boxes);
  }
};

TEST(ReadOff, ExactCoordinatesAndComments) {
  std::istringstream in("OFF\n# comment\n3 1 0\n0 0 0\n0.1 1/3 -2 # tail\n1e0 0 0\n3 0 1 2\n");
  std::istringstream bad_number("OFF\n1 0 0\n0 x 0\n");
  std::istringstream short_list("OFF\n2 0 0\n0 0 0\n");
  std::istringstream no_header("3 1 0\n");
  EXPECT_THROW(read_off(bad_number), ParseError);
  EXPECT_THROW(read_off(short_list), ParseError);
  EXPECT_THROW(read_off(no_header), ParseError);
  // "1e0" is not an exact decimal literal.
  EXPECT_THROW(read_off(in), ParseError);
  std::istringstream ok("OFF\n# comment\n2 0 0\n0 0 0\n0.1 1/3 -2 # tail\n");
  auto pts = read_off(ok);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1], Point3(Rat(1, 10), Rat(1, 3), -2));
  EXPECT_THROW(read_off_file("/nonexistent/x.off"), IoError);
}

TEST(LoadScene, StationFixture) {
  Scene scene = load_scene(kStation / "manifest.json");
  EXPECT_EQ(scene.kb.individuals().size(), 7u);
  EXPECT_EQ(scene.registry.size(), 6u);
  EXPECT_FALSE(scene.registry.contains("site"));
  EXPECT_TRUE(scene.kb.has_class("wall", "Wall"));
  EXPECT_TRUE(scene.kb.has_class("wall", "Geometry"));
  EXPECT_EQ(scene.kb.data_values("pane_s", "haslength"), (std::set<Literal>{Literal(Rat(3, 2))}));
  EXPECT_EQ(scene.kb.data_values("pane_l", "haslength"), (std::set<Literal>{Literal(Rat(5))}));
  EXPECT_EQ(scene.kb.data_values("wall", "material"), (std::set<Literal>{Literal(std::string("brick"))}));
  EXPECT_EQ(scene.kb.properties().size(), 8u);
  EXPECT_EQ(scene.registry.at("wall").vertices().front(), Point3(20, 0, 0));
}

TEST_F(SceneDir, TwoBoxes) {
  Scene scene = load_scene(manifest({{"a", {Point3(0, 0, 0), Point3(1, 1, 1)}}, {"b", {Point3(2, 0, 0), Point3(3, 1, 1)}}}));
  EXPECT_EQ(scene.kb.individuals().size(), 2u);
  EXPECT_EQ(scene.registry.size(), 2u);
  EXPECT_EQ(qualify_all(scene.kb, scene.registry), 1u);
  EXPECT_TRUE(scene.kb.has_triple("a", "topo:disjoint", "b"));
  EXPECT_TRUE(scene.kb.has_triple("b", "topo:disjoint", "a"));
}

TEST_F(SceneDir, SemanticOnlyEntryIsNotQualified) {
  Scene scene = load_scene(manifest({{"a", {Point3(0, 0, 0), Point3(1, 1, 1)}}},
                                    R"({"id": "owner", "class": "Person", "attributes": {"age": 42}})"));
  EXPECT_EQ(scene.kb.individuals().size(), 2u);
  EXPECT_EQ(scene.registry.size(), 1u);
  EXPECT_EQ(qualify_all(scene.kb, scene.registry), 0u);
  EXPECT_EQ(scene.kb.data_values("owner", "age"), (std::set<Literal>{Literal(Rat(42))}));
  for (const auto& t : scene.kb.triples()) EXPECT_NE(t.subject, "owner");
}

TEST_F(SceneDir, FlatBoxNamesTheEntry) {
  fs::path m = manifest({{"slab", {Point3(0, 0, 0), Point3(1, 1, 0)}}});
  try {
    load_scene(m);
    FAIL();
  } catch (const InvalidBody& e) {
    EXPECT_NE(std::string(e.what()).find("slab"), std::string::npos) << e.what();
  }
}

TEST_F(SceneDir, ManifestErrors) {
  spit(dir / "missing.json", R"({"entries": [{"id": "a", "class": "X", "geometry": "nope.off"}]})");
  EXPECT_THROW(load_scene(dir / "missing.json"), IoError);
  spit(dir / "dup.json", R"({"entries": [{"id": "a", "class": "X"}, {"id": "a", "class": "Y"}]})");
  EXPECT_THROW(load_scene(dir / "dup.json"), ParseError);
  spit(dir / "garbage.json", "{not json");
  EXPECT_THROW(load_scene(dir / "garbage.json"), ParseError);
  EXPECT_THROW(load_scene(dir / "absent.json"), IoError);
}

TEST_F(SceneDir, CanonicalSuiteQualification) {
  Scene scene = load_scene(suite_manifest());
  EXPECT_EQ(qualify_all(scene.kb, scene.registry), 36u);
  auto suite = testing::canonical_suite();
  for (const auto& x : suite) {
    for (const auto& y : suite) {
      if (x.name == y.name) continue;
      // Exactly one base relation per ordered pair, and it is the oracle's.
      int count = 0;
      for (TopoRelation r : kAllRelations) count += scene.kb.has_triple(x.name, topo_property(r), y.name);
      EXPECT_EQ(count, 1) << x.name << " " << y.name;
      TopoRelation expected = classify(testing::grid_oracle(x.box, y.box));
      EXPECT_TRUE(scene.kb.has_triple(x.name, topo_property(expected), y.name)) << x.name << " " << y.name;
    }
    EXPECT_TRUE(scene.kb.has_triple(x.name, "topo:equals", x.name));
  }
  EXPECT_TRUE(check_consistency(scene.kb).empty());
}

TEST_F(SceneDir, SingleBodyOnlyEqualsItself) {
  Scene scene = load_scene(manifest({{"solo", {Point3(0, 0, 0), Point3(1, 1, 1)}}}));
  EXPECT_EQ(qualify_all(scene.kb, scene.registry), 0u);
  // No pair, so nothing reaches the topo namespace and no reflexive triple
  // is produced either.
  EXPECT_EQ(scene.kb.triple_count(), 0u);
}

TEST_F(SceneDir, TwinsEqualBothWays) {
  testing::Box b{Point3(0, 0, 0), Point3(2, 1, 1)};
  Scene scene = load_scene(manifest({{"p", b}, {"q", b}}));
  qualify_all(scene.kb, scene.registry);
  EXPECT_TRUE(scene.kb.has_triple("p", "topo:equals", "q"));
  EXPECT_TRUE(scene.kb.has_triple("q", "topo:equals", "p"));
  EXPECT_EQ(scene.kb.triple_count(), 4u);
}

TEST_F(SceneDir, JsonExportDeterministicAndRoundTrips) {
  fs::path m = suite_manifest();
  Scene a = load_scene(m), b = load_scene(m);
  qualify_all(a.kb, a.registry, 1);
  qualify_all(b.kb, b.registry, 4);
  std::string text = export_json(a.kb);
  EXPECT_EQ(text, export_json(b.kb));
  write_export(a.kb, a.registry, ExportFormat::kJson, dir / "kb.json");
  EXPECT_EQ(slurp(dir / "kb.json"), text);
  Scene back = load_kb_document(dir / "kb.json");
  EXPECT_EQ(back.kb, a.kb);
  EXPECT_EQ(back.registry.names(), a.registry.names());
  EXPECT_EQ(load_any(dir / "kb.json").kb, a.kb);
  EXPECT_EQ(load_any(m).kb, load_scene(m).kb);
}

TEST_F(SceneDir, NTriplesExport) {
  Scene scene = load_scene(manifest({{"a", {Point3(0, 0, 0), Point3(1, 1, 1)}}}));
  scene.kb.assert_triple("a", "topo:meets", "b");
  write_export(scene.kb, scene.registry, ExportFormat::kNTriples, dir / "kb.nt");
  std::string text = slurp(dir / "kb.nt");
  EXPECT_NE(text.find("<a> <http://topo9im.local/topo#meets> <b> .\n"), std::string::npos);
  EXPECT_EQ(parse_export_format("ntriples"), ExportFormat::kNTriples);
  EXPECT_THROW(parse_export_format("ttl"), UsageError);
}

TEST_F(SceneDir, ObjHighlightsTheMeetsNeighbours) {
  Scene scene = load_scene(suite_manifest());
  qualify_all(scene.kb, scene.registry);
  ObjExport out = export_obj(scene.kb, scene.registry, "u", TopoRelation::kMeets, "scene.mtl");
  std::map<std::string, std::string> material;
  std::istringstream in(out.obj);
  std::string line, group;
  std::vector<std::array<double, 3>> verts;
  int faces = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "g") ls >> group;
    if (tag == "usemtl") ls >> material[group];
    if (tag == "v") {
      std::array<double, 3> v;
      ls >> v[0] >> v[1] >> v[2];
      verts.push_back(v);
    }
    if (tag == "f") ++faces;
  }
  std::set<std::string> highlighted;
  for (const auto& [g, m] : material)
    if (m == "highlight") highlighted.insert(g);
  std::set<std::string> expected;
  for (const auto& nb : testing::canonical_suite())
    if (scene.kb.has_triple("u", "topo:meets", nb.name)) expected.insert(nb.name);
  EXPECT_EQ(expected, (std::set<std::string>{"edge", "face", "vertex"}));
  EXPECT_EQ(highlighted, expected);
  EXPECT_EQ(material.at("u"), "focus");
  EXPECT_EQ(material.at("far"), "neutral");
  EXPECT_EQ(material.size(), 9u);
  EXPECT_EQ(verts.size(), 72u);
  EXPECT_EQ(faces, 54);
  EXPECT_NE(out.mtl.find("newmtl highlight"), std::string::npos);
  EXPECT_THROW(export_obj(scene.kb, scene.registry, "nobody", TopoRelation::kMeets, "x.mtl"), MissingGeometry);

  write_export(scene.kb, scene.registry, ExportFormat::kObj, dir / "scene.obj", "u", TopoRelation::kMeets);
  EXPECT_EQ(slurp(dir / "scene.obj"), out.obj);
  EXPECT_TRUE(fs::exists(dir / "scene.mtl"));
}

TEST(ObjExport, FacesWindOutward) {
  std::mt19937 rng(4);
  GeometryRegistry registry;
  KnowledgeBase kb;
  for (int i = 0; i < 10; ++i) registry.add("b" + std::to_string(i), testing::random_convex_body(rng));
  ObjExport out = export_obj(kb, registry, std::nullopt, std::nullopt, "x.mtl");
  std::istringstream in(out.obj);
  std::string line;
  std::vector<Point3> verts;
  std::vector<std::vector<size_t>> faces;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::string x, y, z;
      ls >> x >> y >> z;
      verts.emplace_back(parse_rational(x), parse_rational(y), parse_rational(z));
    }
    if (tag == "f") {
      faces.emplace_back();
      size_t k;
      while (ls >> k) faces.back().push_back(k - 1);
    }
  }
  // Half-integer coordinates survive the decimal output exactly.
  ASSERT_FALSE(faces.empty());
  size_t checked = 0;
  for (const auto& name : registry.names()) {
    const Body& body = registry.at(name);
    Point3 inside = relint_point(body.polytope());
    for (const auto& f : faces) {
      std::vector<Point3> pts;
      for (size_t k : f) pts.push_back(verts.at(k));
      if (std::any_of(pts.begin(), pts.end(), [&](const Point3& p) {
            return classify_point(body.polytope(), p) != Location::kOn;
          }))
        continue;
      if (affine_dim(pts) != 2) continue;
      bool all_on_one_facet = false;
      for (const auto& facet : body.polytope().facets()) {
        all_on_one_facet = std::all_of(pts.begin(), pts.end(),
                                       [&](const Point3& p) { return side(body.polytope().halfspaces()[facet.halfspace], p) == Side::kOn; });
        if (all_on_one_facet) break;
      }
      if (!all_on_one_facet) continue;
      ++checked;
      // Every consecutive triple turns the same way, outward.
      for (size_t i = 0; i < pts.size(); ++i) {
        const Point3& a = pts[i];
        const Point3& b = pts[(i + 1) % pts.size()];
        const Point3& c = pts[(i + 2) % pts.size()];
        EXPECT_GT(dot(cross(b - a, c - b), a - inside), 0);
      }
    }
  }
  EXPECT_GE(checked, faces.size());
}

#ifdef TOPO9IM_CLI
int cli(const std::string& args, const fs::path& stdout_file = "/dev/null") {
  std::string cmd = std::string(TOPO9IM_CLI) + " " + args + " > " + stdout_file.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(SceneDir, CliExitCodesAndOutputs) {
  const std::string m = (kStation / "manifest.json").string();
  EXPECT_EQ(cli("qualify " + m + " -o " + (dir / "a.json").string()), 0);
  EXPECT_EQ(cli("qualify " + m + " -j 3", dir / "b.json"), 0);
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));

  EXPECT_EQ(cli("infer " + m + " " + (kStation / "rules.swrl").string() + " -o " + (dir / "c.json").string(),
                dir / "windows.tsv"),
            0);
  EXPECT_EQ(slurp(dir / "windows.tsv"), "?w\npane_s\n");
  KnowledgeBase inferred = load_kb_document(dir / "c.json").kb;
  EXPECT_TRUE(inferred.has_class("station", "RailStation"));
  EXPECT_FALSE(inferred.has_class("depot", "RailStation"));

  EXPECT_EQ(cli("query " + (dir / "a.json").string() + " " + (kStation / "queries.swrl").string(), dir / "q.tsv"), 0);
  EXPECT_EQ(slurp(dir / "q.tsv"), "?y\nwall\n\n?y\t?x\npane_l\twall\npane_s\twall\n");
  EXPECT_EQ(cli("query " + m + " " + (kStation / "queries.swrl").string() + " --qualify", dir / "q2.tsv"), 0);
  EXPECT_EQ(slurp(dir / "q2.tsv"), slurp(dir / "q.tsv"));

  EXPECT_EQ(cli("export " + (dir / "a.json").string() + " --format json", dir / "d.json"), 0);
  EXPECT_EQ(slurp(dir / "d.json"), slurp(dir / "a.json"));
  EXPECT_EQ(cli("export " + (dir / "a.json").string() + " --format obj -o " + (dir / "s.obj").string() +
                " --focus station --relation overlaps"),
            0);
  EXPECT_NE(slurp(dir / "s.obj").find("g track\nusemtl highlight"), std::string::npos);
  EXPECT_EQ(cli("validate " + m), 0);

  // Usage errors.
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("export " + (dir / "a.json").string() + " --format ttl"), 1);
  EXPECT_EQ(cli("export " + (dir / "a.json").string() + " --format obj"), 1);
  EXPECT_EQ(cli("export " + (dir / "a.json").string() + " --format obj -o x.obj --relation near"), 1);
  // Data errors.
  EXPECT_EQ(cli("qualify " + (dir / "missing.json").string()), 2);
  spit(dir / "bad.swrl", "A(?x) -> B(?y)");
  EXPECT_EQ(cli("infer " + m + " " + (dir / "bad.swrl").string()), 2);
  // Consistency violations.
  nlohmann::json doc = nlohmann::json::parse(slurp(dir / "a.json"));
  doc["triples"].push_back({"wall", "topo:inside", "wall"});
  spit(dir / "broken.json", doc.dump());
  spit(dir / "noop.swrl", "");
  // query does not judge consistency; infer over a manifest does.
  EXPECT_EQ(cli("query " + (dir / "broken.json").string() + " " + (dir / "noop.swrl").string()), 0);
  spit(dir / "self.swrl", "Wall(?x) -> topo:inside(?x, ?x)");
  EXPECT_EQ(cli("infer " + m + " " + (dir / "self.swrl").string()), 3);
}
#endif

}  // namespace
}  // namespace topo9im
