#include "topo9im/scene.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "topo9im/error.hpp"

namespace topo9im {

namespace fs = std::filesystem;

namespace {

// Next whitespace-separated token, skipping '#' comments.
bool next_token(std::istream& in, std::string& tok) {
  while (in >> tok) {
    if (tok.front() != '#') return true;
    std::string rest;
    std::getline(in, rest);
  }
  return false;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

bool looks_rational(const std::string& s) {
  try {
    parse_rational(s);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

Literal attribute_literal(const std::string& entry, const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    return looks_rational(s) ? Literal(parse_rational(s)) : Literal(s);
  }
  if (v.is_number_integer()) return Literal(parse_rational(v.dump()));
  if (v.is_number_float()) {
    // dump() gives the shortest text that round-trips the double, which is
    // what was written for ordinary decimals.
    const std::string text = v.dump();
    if (!looks_rational(text))
      throw ParseError("entry '" + entry + "' attribute '" + key + "': write " + text +
                       " as a decimal string for an exact value");
    return Literal(parse_rational(text));
  }
  throw ParseError("entry '" + entry + "' attribute '" + key + "' must be a number or string");
}

}  // namespace

std::vector<Point3> read_off(std::istream& in) {
  std::string tok;
  if (!next_token(in, tok)) throw ParseError("OFF: empty input");
  if (tok != "OFF") throw ParseError("OFF: expected 'OFF' header, found '" + tok + "'");
  auto count = [&](const char* what) {
    std::string t;
    if (!next_token(in, t)) throw ParseError(std::string("OFF: missing ") + what + " count");
    Rat n = parse_rational(t);
    if (n.get_den() != 1 || sgn(n) < 0) throw ParseError(std::string("OFF: bad ") + what + " count '" + t + "'");
    return static_cast<size_t>(n.get_num().get_ui());
  };
  const size_t nv = count("vertex");
  count("face");
  count("edge");
  std::vector<Point3> pts;
  pts.reserve(nv);
  for (size_t i = 0; i < nv; ++i) {
    Point3 p;
    for (int c = 0; c < 3; ++c) {
      if (!next_token(in, tok)) throw ParseError("OFF: truncated vertex list at vertex " + std::to_string(i));
      p[c] = parse_rational(tok);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<Point3> read_off_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_off(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<SceneEntry> read_manifest(const fs::path& manifest) {
  const nlohmann::json doc = read_json(manifest);
  const fs::path base = fs::absolute(manifest).parent_path();
  std::vector<SceneEntry> out;
  std::set<std::string> seen;
  try {
    for (const auto& e : doc.at("entries")) {
      SceneEntry entry;
      entry.id = e.at("id").get<std::string>();
      if (!seen.insert(entry.id).second) throw ParseError("duplicate entry id '" + entry.id + "'");
      if (e.contains("class")) {
        const auto& c = e.at("class");
        if (c.is_array())
          for (const auto& name : c) entry.classes.push_back(name.get<std::string>());
        else
          entry.classes.push_back(c.get<std::string>());
      }
      if (e.contains("geometry") && !e.at("geometry").is_null())
        entry.geometry = (base / e.at("geometry").get<std::string>()).lexically_normal();
      if (e.contains("attributes"))
        for (const auto& [key, value] : e.at("attributes").items())
          entry.attributes.emplace(key, attribute_literal(entry.id, key, value));
      out.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  }
  return out;
}

Scene load_scene(const fs::path& manifest) {
  Scene scene;
  preload_topo_vocabulary(scene.kb);
  for (const auto& entry : read_manifest(manifest)) {
    scene.kb.declare_individual(entry.id);
    for (const auto& c : entry.classes) scene.kb.assert_class(entry.id, c);
    for (const auto& [key, value] : entry.attributes) scene.kb.assert_data(entry.id, key, value);
    if (!entry.geometry) continue;
    const auto points = read_off_file(*entry.geometry);
    try {
      scene.registry.add(entry.id, Body::from_points(points));
    } catch (const Error& e) {
      throw InvalidBody("entry '" + entry.id + "': " + e.what());
    }
    scene.kb.set_geometry_source(entry.id, entry.geometry->string());
  }
  return scene;
}

Scene load_kb_document(const fs::path& path) {
  Scene scene;
  scene.kb = kb_from_json(read_json(path));
  for (const auto& name : scene.kb.individuals()) {
    auto source = scene.kb.geometry_source(name);
    if (!source) continue;
    try {
      scene.registry.add(name, Body::from_points(read_off_file(*source)));
    } catch (const InvalidBody& e) {
      throw InvalidBody("individual '" + name + "': " + e.what());
    } catch (const EmptyGeometry& e) {
      throw InvalidBody("individual '" + name + "': " + e.what());
    }
  }
  return scene;
}

Scene load_any(const fs::path& path) {
  const nlohmann::json doc = read_json(path);
  if (doc.is_object() && doc.contains("entries")) return load_scene(path);
  if (doc.is_object() && doc.contains("triples")) return load_kb_document(path);
  throw ParseError(path.string() + ": neither a scene manifest nor a knowledge-base document");
}

size_t qualify_all(KnowledgeBase& kb, const GeometryRegistry& registry, unsigned threads) {
  const auto names = registry.names();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (size_t i = 0; i < names.size(); ++i)
    for (size_t j = i + 1; j < names.size(); ++j) pairs.emplace_back(names[i], names[j]);

  RelationCache cache(registry);
  cache.prefetch(pairs, threads);
  for (const auto& [a, b] : pairs) {
    TopoRelation r = cache.relation(a, b);
    kb.assert_triple(a, topo_property(r), b);
    kb.assert_triple(b, topo_property(inverse_relation(r)), a);
  }
  materialize(kb);
  return pairs.size();
}

ExportFormat parse_export_format(std::string_view name) {
  if (name == "json") return ExportFormat::kJson;
  if (name == "ntriples") return ExportFormat::kNTriples;
  if (name == "obj") return ExportFormat::kObj;
  throw UsageError("unknown export format '" + std::string(name) + "' (json, ntriples, obj)");
}

std::string export_json(const KnowledgeBase& kb) { return to_json(kb).dump(2) + "\n"; }

namespace {

// Facet vertices in counter-clockwise order seen from outside.
std::vector<size_t> ordered_facet(const Body& body, const Facet& facet) {
  const auto& verts = body.vertices();
  const Vec3& n = body.halfspaces()[facet.halfspace].normal;
  Point3 c(0, 0, 0);
  for (size_t v : facet.vertices) c = c + verts[v];
  c = Rat(1, facet.vertices.size()) * c;
  const Vec3 u = verts[facet.vertices.front()] - c;
  const Vec3 w = cross(n, u);
  auto half = [&](const Vec3& d) {
    int sw = sgn(dot(d, w));
    return sw > 0 || (sw == 0 && sgn(dot(d, u)) > 0) ? 0 : 1;
  };
  std::vector<size_t> out = facet.vertices;
  std::sort(out.begin(), out.end(), [&](size_t a, size_t b) {
    Vec3 da = verts[a] - c, db = verts[b] - c;
    int ha = half(da), hb = half(db);
    if (ha != hb) return ha < hb;
    return sgn(dot(n, cross(da, db))) > 0;
  });
  return out;
}

}  // namespace

ObjExport export_obj(const KnowledgeBase& kb, const GeometryRegistry& registry,
                     const std::optional<std::string>& focus, const std::optional<TopoRelation>& relation,
                     const std::string& mtl_name) {
  if (focus && !registry.contains(*focus)) throw MissingGeometry("focus individual '" + *focus + "' has no geometry");
  std::ostringstream obj;
  obj << std::setprecision(17);
  obj << "# topo9im scene export\n";
  obj << "mtllib " << mtl_name << "\n";
  size_t base = 1;
  for (const auto& name : registry.names()) {
    const Body& body = registry.at(name);
    std::string material = "neutral";
    if (focus && name == *focus)
      material = "focus";
    else if (focus && relation && kb.has_triple(*focus, topo_property(*relation), name))
      material = "highlight";
    obj << "g " << name << "\n";
    obj << "usemtl " << material << "\n";
    for (const auto& v : body.vertices())
      obj << "v " << to_double(v.x) << ' ' << to_double(v.y) << ' ' << to_double(v.z) << "\n";
    for (const auto& f : body.facets()) {
      obj << "f";
      for (size_t v : ordered_facet(body, f)) obj << ' ' << base + v;
      obj << "\n";
    }
    base += body.vertices().size();
  }
  std::string mtl =
      "newmtl neutral\nKd 0.7 0.7 0.7\nd 0.35\n\n"
      "newmtl focus\nKd 0.1 0.3 0.9\nd 1.0\n\n"
      "newmtl highlight\nKd 0.9 0.2 0.1\nd 1.0\n";
  return {obj.str(), mtl};
}

void write_export(const KnowledgeBase& kb, const GeometryRegistry& registry, ExportFormat format,
                  const fs::path& path, const std::optional<std::string>& focus,
                  const std::optional<TopoRelation>& relation) {
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
  };
  switch (format) {
    case ExportFormat::kJson: write(path, export_json(kb)); return;
    case ExportFormat::kNTriples: write(path, to_ntriples(kb)); return;
    case ExportFormat::kObj: {
      fs::path mtl = path;
      mtl.replace_extension(".mtl");
      auto out = export_obj(kb, registry, focus, relation, mtl.filename().string());
      write(path, out.obj);
      write(mtl, out.mtl);
      return;
    }
  }
}

}  // namespace topo9im
