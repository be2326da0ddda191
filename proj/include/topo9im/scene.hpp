#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topo9im/kb.hpp"
#include "topo9im/registry.hpp"

namespace topo9im {

// Vertex list of an ASCII OFF mesh; faces are skipped. Coordinates are read
// exactly with parse_rational. Throws ParseError.
std::vector<Point3> read_off(std::istream& in);
// Throws IoError if the file cannot be opened.
std::vector<Point3> read_off_file(const std::filesystem::path& path);

struct SceneEntry {
  std::string id;
  std::vector<std::string> classes;
  std::optional<std::filesystem::path> geometry;  // resolved against the manifest directory
  std::map<std::string, Literal> attributes;
};

struct Scene {
  KnowledgeBase kb;
  GeometryRegistry registry;
};

// Manifest document:
//   {"entries": [{"id": "w1", "class": "Wall", "geometry": "w1.off",
//                 "attributes": {"haslength": "3/2"}}, ...]}
// "class" may also be an array of class names. Attribute values are JSON
// strings (parsed as exact rationals when they look like one, kept as text
// otherwise) or JSON numbers (read through their shortest decimal form).
std::vector<SceneEntry> read_manifest(const std::filesystem::path& manifest);

// Builds the knowledge base (topo vocabulary preloaded, class assertions,
// data triples, geometry sources) and the body registry. Throws IoError for
// missing files and InvalidBody naming the entry for degenerate or
// unbounded geometry.
Scene load_scene(const std::filesystem::path& manifest);

// Reloads a knowledge-base document written by export_json, re-binding
// bodies from the recorded geometry sources.
Scene load_kb_document(const std::filesystem::path& path);

// Manifest or knowledge-base document, told apart by content.
Scene load_any(const std::filesystem::path& path);

// Classifies every unordered pair of registered individuals once, asserts
// topo:R(a,b) and its inverse (b,a), then materializes. Geometry runs on up
// to `threads` workers (0 = hardware concurrency); assertion order is fixed
// by sorted pair identity. Returns the number of pairs classified.
size_t qualify_all(KnowledgeBase& kb, const GeometryRegistry& registry, unsigned threads = 1);

enum class ExportFormat { kJson, kNTriples, kObj };
// Throws UsageError for anything but "json", "ntriples", "obj".
ExportFormat parse_export_format(std::string_view name);

// Canonical, byte-stable JSON text.
std::string export_json(const KnowledgeBase& kb);

struct ObjExport {
  std::string obj;
  std::string mtl;
};

// Merged mesh with one group per body. Bodies standing in `relation` to
// `focus` (i.e. relation(focus, x) holds in the knowledge base) use the
// "highlight" material, the focus itself uses "focus", the rest "neutral".
// Without a focus every body is neutral.
ObjExport export_obj(const KnowledgeBase& kb, const GeometryRegistry& registry,
                     const std::optional<std::string>& focus, const std::optional<TopoRelation>& relation,
                     const std::string& mtl_name);

// Writes the chosen format to `path` (and, for obj, the material library
// next to it).
void write_export(const KnowledgeBase& kb, const GeometryRegistry& registry, ExportFormat format,
                  const std::filesystem::path& path, const std::optional<std::string>& focus = std::nullopt,
                  const std::optional<TopoRelation>& relation = std::nullopt);

}  // namespace topo9im
