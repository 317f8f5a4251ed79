#include "trackflow/netflow.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "trackflow/lp.hpp"

namespace trackflow::netflow {

void FlowNetwork::validate() const {
    if (node_count <= 0) throw std::invalid_argument("network: empty node set");
    if (source == sink) throw std::invalid_argument("network: source equals sink");
    if (source < 0 || source >= node_count || sink < 0 || sink >= node_count)
        throw std::invalid_argument("network: terminal out of range");
    for (const Arc& a : arcs) {
        if (a.tail == a.head) throw std::invalid_argument("network: self-loop");
        if (a.tail < 0 || a.tail >= node_count || a.head < 0 || a.head >= node_count)
            throw std::invalid_argument("network: arc endpoint out of range");
        if (a.capacity < 0) throw std::invalid_argument("network: negative capacity");
        if (!std::isfinite(a.cost)) throw std::invalid_argument("network: non-finite cost");
    }
}

std::variant<ShortestPaths, NegativeCycle> bellman_ford(const FlowNetwork& net, int s) {
    net.validate();
    const int n = net.node_count;
    std::vector<double> dist(n, kInf), next(n);
    std::vector<int> parent(n, -1), parent_arc(n, -1);
    dist[s] = 0.0;

    bool changed = true;
    for (int round = 0; round < n - 1 && changed; ++round) {
        next = dist;
        changed = false;
        for (std::size_t ai = 0; ai < net.arcs.size(); ++ai) {
            const Arc& a = net.arcs[ai];
            if (dist[a.tail] == kInf) continue;
            const double cand = dist[a.tail] + a.cost;
            if (cand < next[a.head] - kEps) {
                next[a.head] = cand;
                parent[a.head] = a.tail;
                parent_arc[a.head] = static_cast<int>(ai);
                changed = true;
            }
        }
        dist.swap(next);
    }

    // Round n: any further improvement certifies a negative cycle.
    int improved = -1;
    for (std::size_t ai = 0; ai < net.arcs.size(); ++ai) {
        const Arc& a = net.arcs[ai];
        if (dist[a.tail] == kInf) continue;
        if (dist[a.tail] + a.cost < dist[a.head] - kEps) {
            parent[a.head] = a.tail;
            improved = a.head;
            break;
        }
    }
    if (improved >= 0) {
        int v = improved;
        for (int i = 0; i < n; ++i) {
            v = parent[v];  // settle inside the cycle
            if (v < 0) throw std::logic_error("bellman_ford: broken predecessor chain");
        }
        NegativeCycle nc;
        int u = v;
        do {
            nc.cycle.push_back(u);
            u = parent[u];
        } while (u != v);
        nc.cycle.push_back(v);
        std::reverse(nc.cycle.begin(), nc.cycle.end());
        return nc;
    }
    return ShortestPaths{std::move(dist), std::move(parent_arc)};
}

ShortestPaths dijkstra(const FlowNetwork& net, int s) {
    net.validate();
    for (const Arc& a : net.arcs)
        if (a.cost < -kEps) throw std::invalid_argument("dijkstra: negative arc cost");

    const int n = net.node_count;
    std::vector<std::vector<int>> out(n);
    for (std::size_t ai = 0; ai < net.arcs.size(); ++ai) out[net.arcs[ai].tail].push_back(static_cast<int>(ai));

    ShortestPaths sp;
    sp.dist.assign(n, kInf);
    sp.parent_arc.assign(n, -1);
    sp.dist[s] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    heap.push({0.0, s});
    std::vector<bool> settled(n, false);
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (settled[v]) continue;
        settled[v] = true;
        for (int ai : out[v]) {
            const Arc& a = net.arcs[ai];
            const double cand = d + std::max(0.0, a.cost);
            if (cand < sp.dist[a.head] - kEps * (1.0 + std::abs(cand))) {
                sp.dist[a.head] = cand;
                sp.parent_arc[a.head] = ai;
                heap.push({cand, a.head});
            }
        }
    }
    return sp;
}

FlowNetwork reduce_costs(const FlowNetwork& net, const std::vector<double>& pi) {
    FlowNetwork out = net;
    for (Arc& a : out.arcs) a.cost = a.cost - pi[a.tail] + pi[a.head];
    return out;
}

int SplitResult::original_node(int split_node) const { return owner_[split_node]; }

SplitResult split_nodes(const FlowNetwork& net) {
    net.validate();
    SplitResult res;
    res.in_node.resize(net.node_count);
    res.out_node.resize(net.node_count);
    int next = 0;
    for (int v = 0; v < net.node_count; ++v) {
        if (v == net.source || v == net.sink) {
            res.in_node[v] = res.out_node[v] = next++;
            res.owner_.push_back(v);
        } else {
            res.in_node[v] = next++;
            res.out_node[v] = next++;
            res.owner_.push_back(v);
            res.owner_.push_back(v);
        }
    }
    res.net.node_count = next;
    res.net.source = res.out_node[net.source];
    res.net.sink = res.in_node[net.sink];
    for (int v = 0; v < net.node_count; ++v)
        if (res.in_node[v] != res.out_node[v])
            res.net.arcs.push_back({res.in_node[v], res.out_node[v], 0.0, 1});
    for (const Arc& a : net.arcs)
        res.net.arcs.push_back({res.out_node[a.tail], res.in_node[a.head], a.cost, a.capacity});
    return res;
}

namespace {

struct ResidualArc {
    int tail, head;
    double cost;  // original cost (negated on reverse arcs)
    int cap;
};

// Positive-residual arcs as a FlowNetwork with reduced costs, plus the map
// back to residual indices.
struct Materialized {
    FlowNetwork net;
    std::vector<int> residual_index;
};

// Arcs leaving unreachable nodes are dropped: they can never lie on an
// augmenting path and their pinned potentials may leave them negative.
Materialized materialize(const std::vector<ResidualArc>& res, int n, int s, int t,
                         const std::vector<double>& pi, const std::vector<bool>& reachable) {
    Materialized m;
    m.net.node_count = n;
    m.net.source = s;
    m.net.sink = t;
    for (std::size_t i = 0; i < res.size(); ++i) {
        if (res[i].cap <= 0 || !reachable[res[i].tail]) continue;
        const double red = res[i].cost - pi[res[i].tail] + pi[res[i].head];
        m.net.arcs.push_back({res[i].tail, res[i].head, red, res[i].cap});
        m.residual_index.push_back(static_cast<int>(i));
    }
    return m;
}

}  // namespace

FlowSolution successive_shortest_paths(const FlowNetwork& net, const SspOptions& opts) {
    net.validate();
    const int n = net.node_count;
    const int s = net.source;
    const int t = net.sink;

    std::vector<ResidualArc> res(net.arcs.size() * 2);
    for (std::size_t i = 0; i < net.arcs.size(); ++i) {
        const Arc& a = net.arcs[i];
        res[2 * i] = {a.tail, a.head, a.cost, a.capacity};
        res[2 * i + 1] = {a.head, a.tail, -a.cost, 0};
    }

    std::vector<double> pi(n, 0.0);
    std::vector<bool> reachable(n, true);
    FlowSolution out;
    int pushed = 0;

    for (int iter = 0;; ++iter) {
        if (opts.k && pushed >= *opts.k) break;

        const Materialized m = materialize(res, n, s, t, pi, reachable);
        ShortestPaths sp;
        if (iter == 0) {
            auto bf = bellman_ford(m.net, s);
            if (std::holds_alternative<NegativeCycle>(bf))
                throw std::invalid_argument("ssp: input network has a negative cycle");
            sp = std::get<ShortestPaths>(std::move(bf));
        } else {
            sp = dijkstra(m.net, s);
        }

        if (sp.dist[t] == kInf) {
            if (opts.k) out.paths.truncated = true;
            break;
        }

        // sp.dist are reduced lengths; true distance d(v) = dist(v) - pi(v).
        const double marginal = sp.dist[t] - pi[t];
        if (!opts.k && marginal >= -kEps) break;

        // Bottleneck capacity along the parent path.
        int delta = opts.k ? (*opts.k - pushed) : std::numeric_limits<int>::max();
        for (int v = t; v != s;) {
            const int ai = sp.parent_arc[v];
            const ResidualArc& ra = res[m.residual_index[ai]];
            delta = std::min(delta, ra.cap);
            v = ra.tail;
        }
        for (int v = t; v != s;) {
            const int ai = sp.parent_arc[v];
            const int ri = m.residual_index[ai];
            res[ri].cap -= delta;
            res[ri ^ 1].cap += delta;
            v = res[ri].tail;
        }
        pushed += delta;
        for (int d = 0; d < delta; ++d) out.paths.marginal_costs.push_back(marginal);

        // pi := -d over reachable nodes; unreachable nodes are pinned to the
        // largest finite distance and can never lie on an augmenting path.
        double dmax = 0.0;
        for (int v = 0; v < n; ++v)
            if (sp.dist[v] != kInf) dmax = std::max(dmax, sp.dist[v] - pi[v]);
        for (int v = 0; v < n; ++v) {
            reachable[v] = reachable[v] && sp.dist[v] != kInf;
            pi[v] = reachable[v] ? pi[v] - sp.dist[v] : -dmax;
        }

        if (opts.residual_observer) {
            // The eps-optimality invariant covers arcs that future searches
            // can actually traverse, hence the reachable-tail restriction.
            std::vector<Arc> snapshot;
            for (const ResidualArc& ra : res)
                if (ra.cap > 0 && reachable[ra.tail])
                    snapshot.push_back({ra.tail, ra.head, ra.cost - pi[ra.tail] + pi[ra.head], ra.cap});
            opts.residual_observer(snapshot);
        }
    }

    // Decompose the final flow into unit paths.
    out.arc_flow.assign(net.arcs.size(), 0);
    std::vector<int> flow(net.arcs.size());
    for (std::size_t i = 0; i < net.arcs.size(); ++i) {
        flow[i] = res[2 * i + 1].cap;
        out.arc_flow[i] = flow[i];
        out.cost += net.arcs[i].cost * flow[i];
    }
    std::vector<std::vector<int>> out_arcs(n);
    for (std::size_t i = 0; i < net.arcs.size(); ++i) out_arcs[net.arcs[i].tail].push_back(static_cast<int>(i));

    for (int p = 0; p < pushed; ++p) {
        std::vector<int> path{s};
        double cost = 0.0;
        int v = s;
        while (v != t) {
            int chosen = -1;
            for (int ai : out_arcs[v])
                if (flow[ai] > 0) {
                    chosen = ai;
                    break;
                }
            if (chosen < 0) throw std::logic_error("ssp: flow decomposition stuck");
            --flow[chosen];
            cost += net.arcs[chosen].cost;
            v = net.arcs[chosen].head;
            path.push_back(v);
        }
        out.paths.paths.push_back(std::move(path));
        out.paths.path_costs.push_back(cost);
    }
    out.paths.total_cost = out.cost;
    return out;
}

LpFlowResult min_cost_flow_via_lp(const FlowNetwork& net, int flow_amount) {
    net.validate();
    if (flow_amount < 0) throw std::invalid_argument("min_cost_flow_via_lp: negative flow");

    lp::LinearProgram prog;
    prog.sense = lp::Sense::Minimize;
    const int na = static_cast<int>(net.arcs.size());
    prog.objective.resize(na);
    prog.lower.assign(na, 0.0);
    prog.upper.assign(na, std::nullopt);
    for (int i = 0; i < na; ++i) {
        prog.objective[i] = net.arcs[i].cost;
        prog.upper[i] = static_cast<double>(net.arcs[i].capacity);
    }
    // Mass balance at every node: out - in = F at s, -F at t, 0 elsewhere.
    for (int v = 0; v < net.node_count; ++v) {
        std::vector<double> row(na, 0.0);
        for (int i = 0; i < na; ++i) {
            if (net.arcs[i].tail == v) row[i] += 1.0;
            if (net.arcs[i].head == v) row[i] -= 1.0;
        }
        prog.rows.push_back(std::move(row));
        prog.relations.push_back(lp::Relation::Equal);
        prog.rhs.push_back(v == net.source ? flow_amount : (v == net.sink ? -flow_amount : 0.0));
    }

    const lp::SolveResult sol = lp::solve(prog);
    LpFlowResult out;
    if (sol.status == lp::SolveStatus::Infeasible) {
        out.feasible = false;
        return out;
    }
    if (sol.status != lp::SolveStatus::Optimal)
        throw std::logic_error("flow LP cannot be unbounded with finite capacities");
    out.arc_flow.resize(na);
    for (int i = 0; i < na; ++i) {
        const double rounded = std::round(sol.x[i]);
        if (std::abs(sol.x[i] - rounded) > 1e-6)
            throw std::domain_error("flow LP returned a fractional solution");
        out.arc_flow[i] = static_cast<int>(rounded);
        out.cost += net.arcs[i].cost * out.arc_flow[i];
    }
    return out;
}

}  // namespace trackflow::netflow
