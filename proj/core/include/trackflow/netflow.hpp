#ifndef TRACKFLOW_NETFLOW_HPP
#define TRACKFLOW_NETFLOW_HPP

#include <functional>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

namespace trackflow::netflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kEps = 1e-9;

struct Arc {
    int tail = 0;
    int head = 0;
    double cost = 0.0;
    int capacity = 1;
};

struct FlowNetwork {
    int node_count = 0;
    std::vector<Arc> arcs;
    int source = 0;
    int sink = 0;

    void validate() const;  // no self-loops, capacities >= 0, source != sink
};

struct NegativeCycle {
    std::vector<int> cycle;  // one witness, first node repeated at the end
};

struct ShortestPaths {
    std::vector<double> dist;  // +inf for unreachable nodes
    std::vector<int> parent_arc;
};

/// Round-based relaxation with an early exit once a pass changes nothing;
/// reports a negative cycle when round n still improves some distance.
std::variant<ShortestPaths, NegativeCycle> bellman_ford(const FlowNetwork& net, int s);

/// Binary-heap Dijkstra; throws on negative arc costs.
ShortestPaths dijkstra(const FlowNetwork& net, int s);

/// Replaces every arc cost c(i,j) by c(i,j) - pi(i) + pi(j).
FlowNetwork reduce_costs(const FlowNetwork& net, const std::vector<double>& pi);

/// Splits each non-terminal node v into v_in -> v_out (cost 0, capacity 1) so
/// unit flows become node-disjoint; original arcs are rewired out -> in.
struct SplitResult {
    FlowNetwork net;
    std::vector<int> in_node;   // per original node
    std::vector<int> out_node;  // per original node
    int original_node(int split_node) const;

private:
    friend SplitResult split_nodes(const FlowNetwork&);
    std::vector<int> owner_;
};
SplitResult split_nodes(const FlowNetwork& net);

struct PathSet {
    std::vector<std::vector<int>> paths;  // node sequences s..t
    std::vector<double> path_costs;       // original-cost totals per path
    double total_cost = 0.0;
    bool truncated = false;               // k exceeded the number of disjoint paths
    std::vector<double> marginal_costs;   // true cost of each augmenting path
};

struct SspOptions {
    // Fixed number of paths, or stop once the marginal path cost is >= 0.
    std::optional<int> k;
    // Test hook called after each augmentation with the residual state:
    // (residual arcs with positive capacity as (tail, head, reduced cost)).
    std::function<void(const std::vector<Arc>&)> residual_observer;
};

struct FlowSolution {
    PathSet paths;
    std::vector<int> arc_flow;  // per input arc
    double cost = 0.0;
};

/// Successive shortest paths with node potentials: Bellman-Ford for the first
/// search, Dijkstra on reduced costs afterwards; potentials updated to -d.
FlowSolution successive_shortest_paths(const FlowNetwork& net, const SspOptions& opts = {});

/// The same min-cost flow cast as an explicit linear program and solved with
/// the simplex core; used as the cross-check oracle for the combinatorial
/// path. Throws std::domain_error when the solution is not integral.
struct LpFlowResult {
    bool feasible = true;
    std::vector<int> arc_flow;
    double cost = 0.0;
};
LpFlowResult min_cost_flow_via_lp(const FlowNetwork& net, int flow_amount);

}  // namespace trackflow::netflow

#endif
