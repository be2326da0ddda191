// topo9im: qualify, infer, query, export and validate spatial scenes.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "topo9im/error.hpp"
#include "topo9im/rules.hpp"
#include "topo9im/scene.hpp"

namespace {

using namespace topo9im;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInconsistent = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + out_path);
  out << text;
}

void print_queries(const RunReport& report) {
  for (size_t q = 0; q < report.queries.size(); ++q) {
    const auto& result = report.queries[q];
    if (q) std::cout << "\n";
    for (size_t c = 0; c < result.columns.size(); ++c) std::cout << (c ? "\t" : "") << result.columns[c];
    std::cout << "\n";
    for (const auto& row : result.rows) {
      for (size_t c = 0; c < row.size(); ++c) std::cout << (c ? "\t" : "") << row[c];
      std::cout << "\n";
    }
  }
}

int report_violations(const KnowledgeBase& kb) {
  auto violations = check_consistency(kb);
  for (const auto& v : violations) std::cerr << "violation: " << v.to_string() << "\n";
  return violations.empty() ? kExitOk : kExitInconsistent;
}

unsigned thread_count(int flag) { return flag >= 0 ? static_cast<unsigned>(flag) : configured_threads(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact 9-intersection topology for convex bodies, with rule-based enrichment"};
  app.require_subcommand(1);

  std::string manifest, rules_path, out_path, input, format, focus, relation_name_arg;
  bool pre_qualify = false;
  int threads = -1;

  auto* qualify = app.add_subcommand("qualify", "Classify every body pair and write the knowledge base");
  qualify->add_option("manifest", manifest, "Scene manifest (JSON)")->required();
  qualify->add_option("-o,--output", out_path, "Output file (default: stdout)");
  qualify->add_option("-j,--threads", threads, "Worker threads (0 = auto; default from TOPO9IM_THREADS)");

  auto* infer = app.add_subcommand("infer", "Run a rule program over a scene");
  infer->add_option("manifest", manifest, "Scene manifest (JSON)")->required();
  infer->add_option("rules", rules_path, "Rule file")->required();
  infer->add_option("-o,--output", out_path, "Write the enriched knowledge base here");
  infer->add_flag("--qualify", pre_qualify, "Qualify all pairs before running the rules");
  infer->add_option("-j,--threads", threads, "Worker threads for --qualify");

  auto* query = app.add_subcommand("query", "Evaluate select queries; tab-separated results on stdout");
  query->add_option("input", input, "Scene manifest or knowledge-base JSON")->required();
  query->add_option("queries", rules_path, "Query/rule file")->required();
  query->add_flag("--qualify", pre_qualify, "Qualify all pairs before evaluating");
  query->add_option("-j,--threads", threads, "Worker threads for --qualify");

  auto* exp = app.add_subcommand("export", "Export a knowledge base");
  exp->add_option("kb", input, "Knowledge-base JSON")->required();
  exp->add_option("--format", format, "json | ntriples | obj")->required();
  exp->add_option("-o,--output", out_path, "Output file (required for obj)");
  exp->add_option("--focus", focus, "Individual to highlight around (obj)");
  exp->add_option("--relation", relation_name_arg, "Relation from the focus to highlight, e.g. meets (obj)");

  auto* validate = app.add_subcommand("validate", "Load a scene, qualify it and check consistency");
  validate->add_option("manifest", manifest, "Scene manifest (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*qualify) {
      Scene scene = load_scene(manifest);
      qualify_all(scene.kb, scene.registry, thread_count(threads));
      emit(export_json(scene.kb), out_path);
      return report_violations(scene.kb);
    }
    if (*infer) {
      Scene scene = load_scene(manifest);
      auto program = parse_program(read_file(rules_path));
      if (pre_qualify) qualify_all(scene.kb, scene.registry, thread_count(threads));
      RunReport report = run(scene.kb, scene.registry, program);
      print_queries(report);
      std::cerr << "derived " << report.derived << " facts, " << report.enriched << " topo triples from builtins, "
                << report.materialized << " by closure in " << report.rounds << " rounds\n";
      if (!out_path.empty()) emit(export_json(scene.kb), out_path);
      return report_violations(scene.kb);
    }
    if (*query) {
      Scene scene = load_any(input);
      auto program = parse_program(read_file(rules_path));
      if (pre_qualify) qualify_all(scene.kb, scene.registry, thread_count(threads));
      print_queries(run(scene.kb, scene.registry, program));
      return kExitOk;
    }
    if (*exp) {
      const ExportFormat fmt = parse_export_format(format);
      std::optional<TopoRelation> relation;
      if (!relation_name_arg.empty()) {
        relation = relation_from_name(relation_name_arg);
        if (!relation) throw UsageError("unknown relation '" + relation_name_arg + "'");
      }
      if (fmt == ExportFormat::kObj && out_path.empty()) throw UsageError("obj export needs -o <file.obj>");
      Scene scene = load_kb_document(input);
      if (out_path.empty()) {
        std::cout << (fmt == ExportFormat::kJson ? export_json(scene.kb) : to_ntriples(scene.kb));
        return kExitOk;
      }
      write_export(scene.kb, scene.registry, fmt, out_path,
                   focus.empty() ? std::nullopt : std::optional<std::string>(focus), relation);
      return kExitOk;
    }
    if (*validate) {
      Scene scene = load_scene(manifest);
      size_t pairs = qualify_all(scene.kb, scene.registry, configured_threads());
      std::cout << scene.kb.individuals().size() << " individuals, " << scene.registry.size() << " bodies, "
                << pairs << " pairs qualified\n";
      return report_violations(scene.kb);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
