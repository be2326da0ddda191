#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "topo9im/nineim.hpp"
#include "topo9im/polytope.hpp"

namespace topo9im {

// Bodies bound to individual names.
class GeometryRegistry {
 public:
  void add(const std::string& individual, Body body);
  const Body* find(const std::string& individual) const;
  // Throws MissingGeometry.
  const Body& at(const std::string& individual) const;
  bool contains(const std::string& individual) const { return bodies_.contains(individual); }
  // Sorted.
  std::vector<std::string> names() const;
  size_t size() const { return bodies_.size(); }

 private:
  std::map<std::string, std::shared_ptr<const Body>> bodies_;
};

// Named relation between two registered individuals. With memoization on,
// one compute_matrix per unordered pair answers both orders (the reverse
// order is the inverse relation). Thread-safe.
class RelationCache {
 public:
  explicit RelationCache(const GeometryRegistry& registry, bool memoize = true)
      : registry_(registry), memoize_(memoize) {}

  TopoRelation relation(const std::string& a, const std::string& b);

  // Fills the cache for the given pairs, spreading the geometry over up to
  // `threads` workers (0 = hardware concurrency).
  void prefetch(const std::vector<std::pair<std::string, std::string>>& pairs, unsigned threads);

  size_t evaluations() const;

 private:
  const GeometryRegistry& registry_;
  bool memoize_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, TopoRelation> cache_;
  size_t evaluations_ = 0;
};

// Thread count from TOPO9IM_THREADS (unset or 0 = hardware concurrency).
unsigned configured_threads();

}  // namespace topo9im
