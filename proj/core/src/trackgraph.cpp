#include "trackflow/trackgraph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trackflow/lp.hpp"

namespace trackflow::track {

namespace {

constexpr double kProbFloor = 1e-12;

double clamp_confidence(double c) { return std::min(1.0 - 1e-6, std::max(1e-6, c)); }

}  // namespace

double gauss_error(double speed, double v_max) {
    return 0.5 + 0.5 * std::erf((-speed + v_max / 2.0) / (v_max / 4.0));
}

double link_cost(const Detection& a, const Detection& b, const CostParams& params) {
    const int df = b.frame - a.frame;
    if (df < 1 || df > params.f_max) return netflow::kInf;
    const double dt = params.dt(df);
    const double speed = distance(a.pos, b.pos) / dt;
    if (speed > params.v_max) return netflow::kInf;  // the edge (i,j) is erased
    const double e = gauss_error(speed, params.v_max);
    if (e < kProbFloor) return netflow::kInf;
    return -std::log(e) - (df - 1) * std::log(params.b_j);
}

double detection_cost(const Detection& d, const CostParams& params) {
    double cost = std::log(1.0 - clamp_confidence(d.confidence));
    if (!params.entry_points.empty()) {
        double nearest = netflow::kInf;
        for (const Vec3& p : params.entry_points) nearest = std::min(nearest, distance(p, d.pos));
        if (nearest > params.bb_min) cost += std::log(params.bb_min / nearest);
    }
    return cost;
}

TrackingGraph build(std::vector<Detection> dets, const CostParams& params,
                    const LinkCostOverride& extra_link_cost) {
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
    });
    for (Detection& d : dets) d.confidence = clamp_confidence(d.confidence);

    TrackingGraph g;
    g.params = params;
    g.detections = std::move(dets);
    const int n = static_cast<int>(g.detections.size());

    netflow::FlowNetwork& net = g.net;
    net.node_count = 2 + 4 * n;
    net.source = 0;
    net.sink = 1;
    if (n == 0) {
        // still a valid (empty) graph; validate() needs distinct terminals
        return g;
    }

    // Arcs emitted sorted by (tail, head). Source arcs feed the end nodes;
    // begin nodes drain to the sink; per-detection middle arcs cap the
    // throughput of each half pair at one unit.
    for (int k = 0; k < n; ++k) net.arcs.push_back({net.source, g.end_in(k), 0.0, 1});
    for (int k = 0; k < n; ++k) {
        net.arcs.push_back({g.begin_in(k), g.begin_out(k), 0.0, 1});
        net.arcs.push_back({g.begin_out(k), net.sink, 0.0, 1});
        net.arcs.push_back(
            {g.begin_out(k), g.end_in(k), detection_cost(g.detections[k], params), 1});
        ++g.detection_arc_count;
        net.arcs.push_back({g.end_in(k), g.end_out(k), 0.0, 1});
        for (int j = k + 1; j < n; ++j) {
            double cost = link_cost(g.detections[k], g.detections[j], params);
            if (cost == netflow::kInf) continue;
            if (extra_link_cost) {
                const double extra = extra_link_cost(k, j);
                if (extra == netflow::kInf) continue;
                cost += extra;
            }
            net.arcs.push_back({g.end_out(k), g.begin_in(j), cost, 1});
            g.link_arcs.push_back({k, j, static_cast<int>(net.arcs.size()) - 1});
            ++g.link_arc_count;
        }
    }
    return g;
}

namespace {

std::vector<Trajectory> decode_paths(const TrackingGraph& g,
                                     const std::vector<std::vector<int>>& node_paths,
                                     const std::vector<double>& costs) {
    std::vector<Trajectory> out;
    for (std::size_t p = 0; p < node_paths.size(); ++p) {
        Trajectory t;
        t.cost = costs[p];
        for (int node : node_paths[p]) {
            if (node < 2) continue;
            const int det = TrackingGraph::node_detection(node);
            if (t.det_indices.empty() || t.det_indices.back() != det) t.det_indices.push_back(det);
        }
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(), [](const Trajectory& a, const Trajectory& b) {
        return a.det_indices.front() < b.det_indices.front();
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i) + 1;
    return out;
}

// Eq. system on the unit flow: capacity pairs f_in+f_det <= 1,
// f_out+f_det <= 1 and conservation f_in+f_det = sum_j f_t(i,j),
// sum_j f_t(j,i) = f_out+f_det, every flag in {0,1}.
void assert_flow_constraints(const TrackingGraph& g, const std::vector<int>& arc_flow) {
    const int n = static_cast<int>(g.detections.size());
    std::vector<int> f_in(n, 0), f_out(n, 0), f_det(n, 0), links_in(n, 0), links_out(n, 0);
    for (std::size_t i = 0; i < g.net.arcs.size(); ++i) {
        const int f = arc_flow[i];
        if (f != 0 && f != 1) throw std::logic_error("tracking flow is not 0/1");
        if (f == 0) continue;
        const netflow::Arc& a = g.net.arcs[i];
        const int det = TrackingGraph::node_detection(std::max(a.tail, a.head));
        const int kind = (a.tail - 2) % 4;  // position of the tail in its gadget
        if (a.tail == g.net.source) f_in[TrackingGraph::node_detection(a.head)] += f;
        else if (a.head == g.net.sink) f_out[TrackingGraph::node_detection(a.tail)] += f;
        else if (kind == 1 && a.head == a.tail + 1) f_det[det] += f;
        else if (kind == 0 || kind == 2) continue;  // half-pair middle arcs
        else {
            links_out[TrackingGraph::node_detection(a.tail)] += f;
            links_in[TrackingGraph::node_detection(a.head)] += f;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (f_in[i] + f_det[i] > 1 || f_out[i] + f_det[i] > 1)
            throw std::logic_error("tracking flow violates edge capacities");
        if (f_in[i] + f_det[i] != links_out[i] || links_in[i] != f_out[i] + f_det[i])
            throw std::logic_error("tracking flow violates conservation");
    }
}

}  // namespace

std::vector<Trajectory> solve_tracking(const TrackingGraph& graph) {
    if (graph.detections.empty()) return {};
    netflow::SspOptions opts;  // stop once the marginal path cost is >= 0
    const netflow::FlowSolution sol = netflow::successive_shortest_paths(graph.net, opts);
    assert_flow_constraints(graph, sol.arc_flow);
    return decode_paths(graph, sol.paths.paths, sol.paths.path_costs);
}

std::vector<Trajectory> solve_tracking_via_lp(const TrackingGraph& graph) {
    const int n = static_cast<int>(graph.detections.size());
    if (n == 0) return {};
    if (n > 60) throw std::invalid_argument("solve_tracking_via_lp: instance too large for the oracle");

    const auto& arcs = graph.net.arcs;
    lp::LinearProgram prog;
    prog.sense = lp::Sense::Minimize;
    const int na = static_cast<int>(arcs.size());
    prog.objective.resize(na);
    prog.lower.assign(na, 0.0);
    prog.upper.assign(na, 1.0);
    for (int i = 0; i < na; ++i) prog.objective[i] = arcs[i].cost;
    // Mass balance only at detection nodes; the amount of flow through the
    // source and sink is left to the optimizer.
    for (int v = 2; v < graph.net.node_count; ++v) {
        std::vector<double> row(na, 0.0);
        bool nonzero = false;
        for (int i = 0; i < na; ++i) {
            if (arcs[i].tail == v) {
                row[i] += 1.0;
                nonzero = true;
            }
            if (arcs[i].head == v) {
                row[i] -= 1.0;
                nonzero = true;
            }
        }
        if (!nonzero) continue;
        prog.rows.push_back(std::move(row));
        prog.relations.push_back(lp::Relation::Equal);
        prog.rhs.push_back(0.0);
    }

    const lp::SolveResult sol = lp::solve(prog);
    if (sol.status != lp::SolveStatus::Optimal)
        throw std::logic_error("tracking LP must have an optimum (zero flow is feasible)");

    std::vector<int> flow(na);
    for (int i = 0; i < na; ++i) {
        const double r = std::round(sol.x[i]);
        if (std::abs(sol.x[i] - r) > 1e-6)
            throw std::domain_error("tracking LP returned a fractional flow");
        flow[i] = static_cast<int>(r);
    }
    assert_flow_constraints(graph, flow);

    // Decompose the flow into source->sink node paths.
    std::vector<std::vector<int>> out_arcs(graph.net.node_count);
    for (int i = 0; i < na; ++i) out_arcs[arcs[i].tail].push_back(i);
    std::vector<std::vector<int>> paths;
    std::vector<double> costs;
    while (true) {
        int start = -1;
        for (int ai : out_arcs[graph.net.source])
            if (flow[ai] > 0) {
                start = ai;
                break;
            }
        if (start < 0) break;
        std::vector<int> path{graph.net.source};
        double cost = 0.0;
        int v = graph.net.source;
        int next_arc = start;
        while (true) {
            --flow[next_arc];
            cost += arcs[next_arc].cost;
            v = arcs[next_arc].head;
            path.push_back(v);
            if (v == graph.net.sink) break;
            next_arc = -1;
            for (int ai : out_arcs[v])
                if (flow[ai] > 0) {
                    next_arc = ai;
                    break;
                }
            if (next_arc < 0) throw std::logic_error("tracking LP decomposition stuck");
        }
        paths.push_back(std::move(path));
        costs.push_back(cost);
    }
    return decode_paths(graph, paths, costs);
}

double total_cost(const std::vector<Trajectory>& trajectories) {
    double s = 0.0;
    for (const Trajectory& t : trajectories) s += t.cost;
    return s;
}

}  // namespace trackflow::track
