#include "topo9im/registry.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "topo9im/error.hpp"

namespace topo9im {

void GeometryRegistry::add(const std::string& individual, Body body) {
  bodies_[individual] = std::make_shared<const Body>(std::move(body));
}

const Body* GeometryRegistry::find(const std::string& individual) const {
  auto it = bodies_.find(individual);
  return it == bodies_.end() ? nullptr : it->second.get();
}

const Body& GeometryRegistry::at(const std::string& individual) const {
  const Body* b = find(individual);
  if (!b) throw MissingGeometry("no geometry bound to individual '" + individual + "'");
  return *b;
}

std::vector<std::string> GeometryRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(bodies_.size());
  for (const auto& [name, unused] : bodies_) out.push_back(name);
  return out;
}

TopoRelation RelationCache::relation(const std::string& a, const std::string& b) {
  const Body& body_a = registry_.at(a);
  const Body& body_b = registry_.at(b);
  if (!memoize_) {
    std::lock_guard lock(mutex_);
    ++evaluations_;
    return relate(body_a, body_b);
  }
  const bool swapped = b < a;
  auto key = swapped ? std::make_pair(b, a) : std::make_pair(a, b);
  TopoRelation r;
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return swapped ? inverse_relation(it->second) : it->second;
  }
  r = swapped ? relate(body_b, body_a) : relate(body_a, body_b);
  {
    std::lock_guard lock(mutex_);
    if (cache_.emplace(key, r).second) ++evaluations_;
  }
  return swapped ? inverse_relation(r) : r;
}

void RelationCache::prefetch(const std::vector<std::pair<std::string, std::string>>& pairs, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<size_t>(1, pairs.size()));
  if (threads <= 1) {
    for (const auto& [a, b] : pairs) relation(a, b);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (size_t i = next++; i < pairs.size(); i = next++) relation(pairs[i].first, pairs[i].second);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

size_t RelationCache::evaluations() const {
  std::lock_guard lock(mutex_);
  return evaluations_;
}

unsigned configured_threads() {
  if (const char* env = std::getenv("TOPO9IM_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return 0;
}

}  // namespace topo9im
