#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pancad/drawing.hpp"
#include "pancad/random.hpp"

namespace pancad {

struct GraphConfig {
  double epsilon = 100.0;  // mm
  double eta = 0.2;
  int k_max = 3;
  std::uint64_t seed = 0;
  double parallel_angle_tol = 0.01;  // radians
  int threads = 1;                   // candidate search only; never changes the result

  void validate() const;
};

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Undirected entity graph. Edges satisfy i < j and are sorted.
class EntityGraph {
 public:
  EntityGraph() = default;
  EntityGraph(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return adjacency_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::uint32_t>& neighbors(std::size_t v) const { return adjacency_[v]; }
  std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
  std::size_t max_degree() const;

  std::string to_json() const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
};

/// Distance used for edge creation: the endpoint distance, or the scaled
/// parallel distance when both entities are near-parallel segments.
double edge_distance(const Entity& a, const Entity& b, const GraphConfig& cfg);

/// Candidate edges (before degree capping), via a uniform grid.
std::vector<Edge> candidate_edges(const Drawing& d, const GraphConfig& cfg);

/// All-pairs reference for `candidate_edges`.
std::vector<Edge> candidate_edges_bruteforce(const Drawing& d, const GraphConfig& cfg);

/// Node-order sweep removing uniformly random incident edges until every
/// degree is at most k_max. Seeded from (seed, drawing_id).
std::vector<Edge> cap_degrees(std::size_t node_count, std::vector<Edge> edges, int k_max, std::uint64_t seed,
                              const std::string& drawing_id);

EntityGraph build_graph(const Drawing& d, const GraphConfig& cfg = {});

}  // namespace pancad
