#include "pancad/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "pancad/errors.hpp"

namespace pancad {

void GraphConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw Error("eta must lie in (0, 1]");
  if (k_max < 1) throw Error("k_max must be at least 1");
  if (!(parallel_angle_tol > 0.0)) throw Error("parallel angle tolerance must be positive");
}

EntityGraph::EntityGraph(std::size_t node_count, std::vector<Edge> edges)
    : edges_(std::move(edges)), adjacency_(node_count) {
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    auto [i, j] = edges_[k];
    if (i >= j || j >= node_count) throw InvariantViolation("edge must satisfy i < j < n");
    if (k > 0 && edges_[k - 1] == edges_[k]) throw InvariantViolation("duplicate edge");
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }
  for (auto& a : adjacency_) std::sort(a.begin(), a.end());
}

std::size_t EntityGraph::max_degree() const {
  std::size_t m = 0;
  for (const auto& a : adjacency_) m = std::max(m, a.size());
  return m;
}

std::string EntityGraph::to_json() const {
  nlohmann::json j;
  j["n"] = node_count();
  auto arr = nlohmann::json::array();
  for (auto [a, b] : edges_) arr.push_back({a, b});
  j["edges"] = std::move(arr);
  return j.dump() + "\n";
}

double edge_distance(const Entity& a, const Entity& b, const GraphConfig& cfg) {
  double d = entity_distance(a, b);
  if (is_parallel(a, b, cfg.parallel_angle_tol))
    d = std::min(d, parallel_distance(a, b, cfg.eta, cfg.parallel_angle_tol));
  return d;
}

std::vector<Edge> candidate_edges_bruteforce(const Drawing& d, const GraphConfig& cfg) {
  std::vector<Edge> out;
  const auto n = static_cast<std::uint32_t>(d.size());
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (edge_distance(d.records[i].entity, d.records[j].entity, cfg) < cfg.epsilon) out.emplace_back(i, j);
  return out;
}

namespace {

class UniformGrid {
 public:
  UniformGrid(const Box& area, double cell) : origin_{area.xmin, area.ymin}, cell_(cell) {
    // Grow the cell until the grid stays reasonably small.
    for (;;) {
      nx_ = static_cast<long>(std::floor(area.width() / cell_)) + 1;
      ny_ = static_cast<long>(std::floor(area.height() / cell_)) + 1;
      if (nx_ * ny_ <= kMaxCells) break;
      cell_ *= 2.0;
    }
    cells_.resize(static_cast<std::size_t>(nx_ * ny_));
  }

  void insert(std::uint32_t id, const Box& b) {
    auto [x0, y0, x1, y1] = range(b);
    for (long y = y0; y <= y1; ++y)
      for (long x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y * nx_ + x)].push_back(id);
  }

  template <class F>
  void visit(const Box& b, F&& f) const {
    auto [x0, y0, x1, y1] = range(b);
    for (long y = y0; y <= y1; ++y)
      for (long x = x0; x <= x1; ++x)
        for (auto id : cells_[static_cast<std::size_t>(y * nx_ + x)]) f(id);
  }

 private:
  static constexpr long kMaxCells = 1L << 22;

  struct Range {
    long x0, y0, x1, y1;
  };

  long clamp_x(double v) const {
    return std::clamp(static_cast<long>(std::floor((v - origin_.x) / cell_)), 0L, nx_ - 1);
  }
  long clamp_y(double v) const {
    return std::clamp(static_cast<long>(std::floor((v - origin_.y) / cell_)), 0L, ny_ - 1);
  }
  Range range(const Box& b) const { return {clamp_x(b.xmin), clamp_y(b.ymin), clamp_x(b.xmax), clamp_y(b.ymax)}; }

  Point2 origin_;
  double cell_;
  long nx_ = 1;
  long ny_ = 1;
  std::vector<std::vector<std::uint32_t>> cells_;
};

Box inflate(const Box& b, double r) { return {b.xmin - r, b.ymin - r, b.xmax + r, b.ymax + r}; }

}  // namespace

std::vector<Edge> candidate_edges(const Drawing& d, const GraphConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::uint32_t>(d.size());
  if (n < 2) return {};

  std::vector<Box> boxes(n);
  Box area = d.extent;
  for (std::uint32_t i = 0; i < n; ++i) {
    boxes[i] = entity_bbox(d.records[i].entity);
    area.expand(boxes[i]);
  }
  UniformGrid grid(area, cfg.epsilon);
  for (std::uint32_t i = 0; i < n; ++i) grid.insert(i, boxes[i]);

  // Endpoint distances live inside the entity box; parallel segments connect
  // up to epsilon / eta apart.
  const double parallel_reach = cfg.epsilon / cfg.eta;

  auto search = [&](std::uint32_t begin, std::uint32_t end, std::vector<Edge>& out) {
    std::vector<std::uint32_t> seen(n, std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t i = begin; i < end; ++i) {
      const Entity& ei = d.records[i].entity;
      double reach = std::holds_alternative<Segment>(ei) ? std::max(cfg.epsilon, parallel_reach) : cfg.epsilon;
      grid.visit(inflate(boxes[i], reach), [&](std::uint32_t j) {
        if (j <= i || seen[j] == i) return;
        seen[j] = i;
        if (edge_distance(ei, d.records[j].entity, cfg) < cfg.epsilon) out.emplace_back(i, j);
      });
    }
  };

  const int threads = std::clamp(cfg.threads, 1, 64);
  std::vector<std::vector<Edge>> parts(static_cast<std::size_t>(threads));
  if (threads == 1) {
    search(0, n, parts[0]);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      std::uint32_t b = static_cast<std::uint32_t>(static_cast<std::uint64_t>(n) * t / threads);
      std::uint32_t e = static_cast<std::uint32_t>(static_cast<std::uint64_t>(n) * (t + 1) / threads);
      pool.emplace_back(search, b, e, std::ref(parts[static_cast<std::size_t>(t)]));
    }
    for (auto& th : pool) th.join();
  }
  std::vector<Edge> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> cap_degrees(std::size_t node_count, std::vector<Edge> edges, int k_max, std::uint64_t seed,
                              const std::string& drawing_id) {
  std::vector<std::vector<std::uint32_t>> adj(node_count);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  Rng rng(mix_seed(seed, fnv1a(drawing_id)));
  const auto cap = static_cast<std::size_t>(k_max);
  for (std::size_t v = 0; v < node_count; ++v) {
    while (adj[v].size() > cap) {
      auto k = static_cast<std::size_t>(uniform_index(rng, adj[v].size()));
      std::uint32_t u = adj[v][k];
      adj[v].erase(adj[v].begin() + static_cast<std::ptrdiff_t>(k));
      auto& au = adj[u];
      au.erase(std::find(au.begin(), au.end(), static_cast<std::uint32_t>(v)));
    }
  }

  std::vector<Edge> out;
  for (std::size_t v = 0; v < node_count; ++v)
    for (auto u : adj[v])
      if (u > v) out.emplace_back(static_cast<std::uint32_t>(v), u);
  return out;
}

EntityGraph build_graph(const Drawing& d, const GraphConfig& cfg) {
  cfg.validate();
  auto edges = cap_degrees(d.size(), candidate_edges(d, cfg), cfg.k_max, cfg.seed, d.id);
  EntityGraph g(d.size(), std::move(edges));
  if (g.max_degree() > static_cast<std::size_t>(cfg.k_max)) throw InvariantViolation("degree cap exceeded");
  return g;
}

}  // namespace pancad
