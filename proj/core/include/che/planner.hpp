#ifndef CHE_PLANNER_HPP
#define CHE_PLANNER_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "che/ch_map.hpp"

namespace che {

/// Planning-stage failures that map to CLI exit code 3.
class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PrmParams {
  int node_count{200};
  double connect_radius{8.0};  // D_max, meters
  uint64_t seed{0};
};

/// Sampled roadmap over the free space of a chi map. Undirected, no self
/// loops; every edge is collision-free with Euclidean weight <= D_max.
/// Immutable after build; concurrent queries are safe.
struct PrmGraph {
  std::vector<WorldPoint> nodes;
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  PrmParams params;

  size_t edge_count() const;
};

/// Rejection-samples node_count nodes uniformly over free cells, then
/// connects every pair within connect_radius whose straight segment is free.
/// Nodes are drawn sequentially from the seed stream, so the same seed with a
/// larger node_count extends the node set instead of reshuffling it.
/// Throws PlanningError when free space cannot host the nodes within
/// 100 * node_count attempts.
PrmGraph prm_build(const ChMap& chmap, const PrmParams& params);

/// Roadmap extended with temporary start/goal nodes (ids start_id/goal_id),
/// connected under the same radius/collision rule; zero-length edges are
/// permitted for query points. The base graph is left untouched.
struct AugmentedQuery {
  PrmGraph graph;
  int start_id{0};
  int goal_id{0};
};

/// Throws PlanningError when start or goal lies in a CH/blocked cell.
AugmentedQuery connect_query_points(const PrmGraph& g, const ChMap& chmap,
                                    WorldPoint start, WorldPoint goal);

struct PathResult {
  std::vector<int> nodes;
  double length{0.0};
};

/// A* with the straight-line heuristic (admissible and consistent for
/// Euclidean weights); ties break on the smaller node index. nullopt when t
/// is unreachable.
std::optional<PathResult> astar(const PrmGraph& g, int s, int t);

std::vector<WorldPoint> path_waypoints(const PrmGraph& g,
                                       const PathResult& path);

/// Debug/golden dump: nodes.csv (`id,x,y`) and edges.csv (`i,j,weight`).
void save_prm_csv(const PrmGraph& g, const std::string& nodes_path,
                  const std::string& edges_path);

}  // namespace che

#endif  // CHE_PLANNER_HPP
