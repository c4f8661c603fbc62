#include "che/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>

#include "che/rng.hpp"

namespace che {

size_t PrmGraph::edge_count() const {
  size_t twice = 0;
  for (const auto& adj : adjacency) twice += adj.size();
  return twice / 2;
}

namespace {

void add_edge(PrmGraph& g, int a, int b, double w) {
  g.adjacency[a].emplace_back(b, w);
  g.adjacency[b].emplace_back(a, w);
}

void connect_node(PrmGraph& g, const ChMap& chmap, int id, bool allow_zero) {
  const WorldPoint p = g.nodes[id];
  for (int other = 0; other < id; ++other) {
    const double d = distance(p, g.nodes[other]);
    if (d > g.params.connect_radius) continue;
    if (d == 0.0 && !allow_zero) continue;
    if (!chmap.chi.segment_free(p, g.nodes[other])) continue;
    add_edge(g, id, other, d);
  }
}

}  // namespace

PrmGraph prm_build(const ChMap& chmap, const PrmParams& params) {
  if (params.node_count < 2) throw PlanningError("prm_build: need at least 2 nodes");
  if (chmap.chi.free_cell_count() == 0) throw PlanningError("prm_build: no free space");

  PrmGraph g;
  g.params = params;
  g.nodes.reserve(params.node_count);

  const GridMap& m = chmap.chi;
  const double x0 = m.origin().x, y0 = m.origin().y;
  const double x1 = x0 + m.width() * m.resolution();
  const double y1 = y0 + m.height() * m.resolution();

  Rng rng(params.seed);
  const uint64_t max_attempts = 100ULL * static_cast<uint64_t>(params.node_count);
  uint64_t attempts = 0;
  while (static_cast<int>(g.nodes.size()) < params.node_count) {
    if (attempts++ >= max_attempts) {
      throw PlanningError("prm_build: rejection sampling exhausted; free space too small");
    }
    const WorldPoint p{rng.uniform(x0, x1), rng.uniform(y0, y1)};
    if (m.point_free(p)) g.nodes.push_back(p);
  }

  g.adjacency.resize(g.nodes.size());
  for (int id = 1; id < static_cast<int>(g.nodes.size()); ++id) {
    connect_node(g, chmap, id, /*allow_zero=*/false);
  }
  return g;
}

AugmentedQuery connect_query_points(const PrmGraph& g, const ChMap& chmap,
                                    WorldPoint start, WorldPoint goal) {
  if (!chmap.chi.point_free(start)) throw PlanningError("connect_query_points: start blocked");
  if (!chmap.chi.point_free(goal)) throw PlanningError("connect_query_points: goal blocked");

  AugmentedQuery q;
  q.graph = g;
  q.start_id = static_cast<int>(g.nodes.size());
  q.goal_id = q.start_id + 1;
  q.graph.nodes.push_back(start);
  q.graph.nodes.push_back(goal);
  q.graph.adjacency.resize(q.graph.nodes.size());
  connect_node(q.graph, chmap, q.start_id, /*allow_zero=*/true);
  connect_node(q.graph, chmap, q.goal_id, /*allow_zero=*/true);
  return q;
}

std::optional<PathResult> astar(const PrmGraph& g, int s, int t) {
  const int n = static_cast<int>(g.nodes.size());
  if (s < 0 || s >= n || t < 0 || t >= n) {
    throw std::invalid_argument("astar: node id out of range");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> gscore(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<char> closed(n, 0);

  // (f, node); smaller node index wins on equal f for a deterministic order.
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  auto h = [&](int v) { return distance(g.nodes[v], g.nodes[t]); };

  gscore[s] = 0.0;
  open.emplace(h(s), s);
  while (!open.empty()) {
    const auto [f, v] = open.top();
    open.pop();
    if (closed[v]) continue;
    closed[v] = 1;
    if (v == t) break;
    for (const auto& [w, weight] : g.adjacency[v]) {
      if (closed[w]) continue;
      const double cand = gscore[v] + weight;
      if (cand < gscore[w]) {
        gscore[w] = cand;
        parent[w] = v;
        open.emplace(cand + h(w), w);
      }
    }
  }

  if (gscore[t] == kInf) return std::nullopt;
  PathResult result;
  result.length = gscore[t];
  for (int v = t; v != -1; v = parent[v]) result.nodes.push_back(v);
  std::reverse(result.nodes.begin(), result.nodes.end());
  return result;
}

std::vector<WorldPoint> path_waypoints(const PrmGraph& g,
                                       const PathResult& path) {
  std::vector<WorldPoint> pts;
  pts.reserve(path.nodes.size());
  for (int id : path.nodes) pts.push_back(g.nodes[id]);
  return pts;
}

void save_prm_csv(const PrmGraph& g, const std::string& nodes_path,
                  const std::string& edges_path) {
  std::ofstream fn(nodes_path, std::ios::binary);
  if (!fn) throw std::runtime_error("save_prm_csv: cannot open " + nodes_path);
  fn << "id,x,y\n";
  char buf[96];
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", i, g.nodes[i].x, g.nodes[i].y);
    fn << buf;
  }
  std::ofstream fe(edges_path, std::ios::binary);
  if (!fe) throw std::runtime_error("save_prm_csv: cannot open " + edges_path);
  fe << "i,j,weight\n";
  for (size_t i = 0; i < g.adjacency.size(); ++i) {
    for (const auto& [j, w] : g.adjacency[i]) {
      if (static_cast<size_t>(j) < i) continue;
      std::snprintf(buf, sizeof(buf), "%zu,%d,%.6f\n", i, j, w);
      fe << buf;
    }
  }
}

}  // namespace che
