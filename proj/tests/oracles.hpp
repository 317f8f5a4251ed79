// Independent brute-force oracles used to freeze expected values; these stay
// deliberately naive and separate from the implementation paths they check.
#ifndef TRACKFLOW_TESTS_ORACLES_HPP
#define TRACKFLOW_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "trackflow/lp.hpp"
#include "trackflow/netflow.hpp"
#include "trackflow/trackgraph.hpp"

namespace oracles {

// --------------------------------------------------------------------------
// Vertex enumeration for max/<=/x>=0 style programs: try every subset of n
// active rows from the full inequality system (rows plus bounds), solve the
// square system, keep feasible points, return the best objective.

struct VertexOptimum {
    bool feasible = false;
    bool bounded_at_vertex = false;
    double objective = 0.0;
    std::vector<double> x;
};

inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    x.assign(n, 0.0);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        double best = 1e-9;
        for (int r = c; r < n; ++r)
            if (std::abs(a[r][c]) > best) {
                best = std::abs(a[r][c]);
                piv = r;
            }
        if (piv < 0) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (int c = 0; c < n; ++c) x[c] = b[c] / a[c][c];
    return true;
}

inline VertexOptimum enumerate_vertices(const trackflow::lp::LinearProgram& lp) {
    using trackflow::lp::Relation;
    const int n = lp.num_vars();
    // Oriented full system: rows plus finite bound rows.
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<bool> is_eq;
    for (int r = 0; r < lp.num_rows(); ++r) {
        rows.push_back(lp.rows[r]);
        rhs.push_back(lp.rhs[r]);
        is_eq.push_back(lp.relations[r] == Relation::Equal);
        if (lp.relations[r] == Relation::GreaterEqual) {
            for (double& v : rows.back()) v = -v;
            rhs.back() = -rhs.back();
        }
    }
    for (int j = 0; j < n; ++j) {
        if (auto lo = lp.lower_bound(j)) {
            std::vector<double> row(n, 0.0);
            row[j] = -1.0;
            rows.push_back(row);
            rhs.push_back(-*lo);
            is_eq.push_back(false);
        }
        if (auto up = lp.upper_bound(j)) {
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            rows.push_back(row);
            rhs.push_back(*up);
            is_eq.push_back(false);
        }
    }
    const int m = static_cast<int>(rows.size());

    VertexOptimum best;
    std::vector<int> pick(n, 0);
    std::vector<int> idx(n);
    // iterate all n-subsets of rows
    for (int i = 0; i < n; ++i) idx[i] = i;
    if (m < n) return best;
    while (true) {
        std::vector<std::vector<double>> a(n);
        std::vector<double> b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = rows[idx[i]];
            b[i] = rhs[idx[i]];
        }
        std::vector<double> x;
        if (solve_square(a, b, x)) {
            bool ok = true;
            for (int r = 0; r < m && ok; ++r) {
                double lhs = 0.0;
                for (int j = 0; j < n; ++j) lhs += rows[r][j] * x[j];
                if (is_eq[r] ? std::abs(lhs - rhs[r]) > 1e-7 : lhs > rhs[r] + 1e-7) ok = false;
            }
            if (ok) {
                double z = 0.0;
                for (int j = 0; j < n; ++j) z += lp.objective[j] * x[j];
                const bool better = lp.sense == trackflow::lp::Sense::Maximize
                                        ? z > best.objective
                                        : z < best.objective;
                if (!best.feasible || better) {
                    best.feasible = true;
                    best.objective = z;
                    best.x = x;
                }
            }
        }
        // next combination
        int i = n - 1;
        while (i >= 0 && idx[i] == m - n + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int k = i + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
    }
    return best;
}

// --------------------------------------------------------------------------
// Exhaustive shortest paths by path enumeration (small DAG-ish graphs).

inline void enumerate_paths_rec(const trackflow::netflow::FlowNetwork& net, int v, int target,
                                double cost, std::vector<bool>& visited, double& best) {
    if (v == target) {
        best = std::min(best, cost);
        return;
    }
    for (const auto& a : net.arcs) {
        if (a.tail != v || visited[a.head]) continue;
        visited[a.head] = true;
        enumerate_paths_rec(net, a.head, target, cost + a.cost, visited, best);
        visited[a.head] = false;
    }
}

inline double exhaustive_shortest_path(const trackflow::netflow::FlowNetwork& net, int s, int t) {
    std::vector<bool> visited(net.node_count, false);
    visited[s] = true;
    double best = trackflow::netflow::kInf;
    enumerate_paths_rec(net, s, t, 0.0, visited, best);
    return best;
}

// Memoized variant for topologically ordered DAGs (arcs tail < head), where
// plain path enumeration blows up around 15 nodes.
inline double dag_shortest(const trackflow::netflow::FlowNetwork& net, int s, int t) {
    std::vector<double> memo(net.node_count, trackflow::netflow::kInf);
    memo[s] = 0.0;
    for (int v = s; v <= t; ++v) {
        if (memo[v] == trackflow::netflow::kInf) continue;
        for (const auto& a : net.arcs)
            if (a.tail == v) memo[a.head] = std::min(memo[a.head], memo[v] + a.cost);
    }
    return memo[t];
}

// --------------------------------------------------------------------------
// Exhaustive MAP oracle over trajectory sets: every partition of a detection
// subset into frame-increasing chains with admissible links, costed exactly
// like the flow objective (links plus interior detection bonuses).

struct MapOracleResult {
    double best_cost = 0.0;  // empty set (null flow) costs 0
    std::vector<std::vector<int>> best_set;
};

class MapOracle {
public:
    explicit MapOracle(const trackflow::track::TrackingGraph& graph) {
        const auto& dets = graph.detections;
        n_ = static_cast<int>(dets.size());
        if (n_ > 20) throw std::invalid_argument("MapOracle: too many detections to enumerate");
        link_.assign(n_, std::vector<double>(n_, trackflow::netflow::kInf));
        for (const auto& la : graph.link_arcs)
            link_[la.from_det][la.to_det] = graph.net.arcs[la.arc_index].cost;
        det_cost_.resize(n_);
        for (int i = 0; i < n_; ++i) det_cost_[i] = detection_cost(dets[i], graph.params);
    }

    // Subset dynamics: f(S) = cheapest trajectory set using only detections
    // in S, where the lowest detection of S either stays unused or starts a
    // chain enumerated over S.
    MapOracleResult solve() {
        const std::size_t states = std::size_t(1) << n_;
        f_.assign(states, 0.0);
        choice_.assign(states, {});
        std::vector<bool> done(states, false);
        done[0] = true;
        for (std::size_t s = 1; s < states; ++s) value(s, done);

        MapOracleResult out;
        std::size_t s = states - 1;
        out.best_cost = f_[s];
        while (s) {
            const std::vector<int>& chain = choice_[s];
            if (chain.empty()) {
                s &= s - 1U;  // lowest detection stays unused
                continue;
            }
            out.best_set.push_back(chain);
            for (int v : chain) s &= ~(std::size_t(1) << v);
        }
        std::sort(out.best_set.begin(), out.best_set.end());
        return out;
    }

private:
    int lowest(std::size_t s) const { return __builtin_ctzll(s); }

    void value(std::size_t s, std::vector<bool>& done) {
        if (done[s]) return;
        const int i = lowest(s);
        // option 1: detection i stays out of every trajectory
        f_[s] = f_[s & (s - 1U)];
        choice_[s] = {};
        // option 2: i starts a chain within s
        std::vector<int> chain{i};
        extend(s & ~(std::size_t(1) << i), chain, 0.0, s);
        done[s] = true;
    }

    void extend(std::size_t rest, std::vector<int>& chain, double links, std::size_t s) {
        if (chain.size() >= 2) {
            // interior bonuses: all but first and last member
            double cost = links;
            for (std::size_t k = 1; k + 1 < chain.size(); ++k) cost += det_cost_[chain[k]];
            const double total = cost + f_[rest];
            if (total < f_[s] - 1e-12) {
                f_[s] = total;
                choice_[s] = chain;
            }
        }
        const int tail = chain.back();
        for (int j = 0; j < n_; ++j) {
            if (!(rest & (std::size_t(1) << j))) continue;
            if (link_[tail][j] == trackflow::netflow::kInf) continue;
            chain.push_back(j);
            extend(rest & ~(std::size_t(1) << j), chain, links + link_[tail][j], s);
            chain.pop_back();
        }
    }

    int n_ = 0;
    std::vector<std::vector<double>> link_;
    std::vector<double> det_cost_;
    std::vector<double> f_;
    std::vector<std::vector<int>> choice_;
};

// --------------------------------------------------------------------------
// Brute-force minimum assignment (n <= ~8).

inline double brute_force_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    double best = trackflow::netflow::kInf;
    do {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += cost[i][perm[i]];
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// --------------------------------------------------------------------------
// All node-disjoint path pairs, brute force (tiny graphs).

inline double best_disjoint_pair(const trackflow::netflow::FlowNetwork& net) {
    // enumerate all simple paths, then all pairwise combinations
    std::vector<std::vector<int>> paths;
    std::vector<double> costs;
    std::vector<int> path{net.source};
    std::vector<bool> visited(net.node_count, false);
    visited[net.source] = true;

    std::function<void(int, double)> rec = [&](int v, double c) {
        if (v == net.sink) {
            paths.push_back(path);
            costs.push_back(c);
            return;
        }
        for (const auto& a : net.arcs) {
            if (a.tail != v || visited[a.head]) continue;
            visited[a.head] = true;
            path.push_back(a.head);
            rec(a.head, c + a.cost);
            path.pop_back();
            visited[a.head] = false;
        }
    };
    rec(net.source, 0.0);

    double best = trackflow::netflow::kInf;
    for (std::size_t p = 0; p < paths.size(); ++p)
        for (std::size_t q = p + 1; q < paths.size(); ++q) {
            bool disjoint = true;
            for (std::size_t i = 1; i + 1 < paths[p].size() && disjoint; ++i)
                for (std::size_t j = 1; j + 1 < paths[q].size(); ++j)
                    if (paths[p][i] == paths[q][j]) {
                        disjoint = false;
                        break;
                    }
            if (disjoint) best = std::min(best, costs[p] + costs[q]);
        }
    return best;
}

// --------------------------------------------------------------------------
// Random generators shared across test files.

inline trackflow::lp::LinearProgram random_bounded_lp(std::mt19937_64& rng) {
    using namespace trackflow::lp;
    std::uniform_int_distribution<int> nd(1, 4), md(0, 4);
    std::uniform_real_distribution<double> coef(-3.0, 3.0), box(2.0, 8.0);
    std::uniform_int_distribution<int> rel(0, 5);

    LinearProgram lp;
    const int n = nd(rng);
    const int m = md(rng);
    lp.sense = (rel(rng) % 2 == 0) ? Sense::Maximize : Sense::Minimize;
    lp.objective.resize(n);
    for (double& c : lp.objective) c = coef(rng);
    // random rows through a feasible interior point x0 >= 0
    std::vector<double> x0(n);
    for (double& v : x0) v = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    for (int r = 0; r < m; ++r) {
        std::vector<double> row(n);
        for (double& v : row) v = coef(rng);
        double ax = 0.0;
        for (int j = 0; j < n; ++j) ax += row[j] * x0[j];
        const int kind = rel(rng);
        if (kind < 4) {
            lp.relations.push_back(Relation::LessEqual);
            lp.rhs.push_back(ax + std::uniform_real_distribution<double>(0.1, 2.0)(rng));
        } else if (kind == 4) {
            lp.relations.push_back(Relation::GreaterEqual);
            lp.rhs.push_back(ax - std::uniform_real_distribution<double>(0.1, 2.0)(rng));
        } else {
            lp.relations.push_back(Relation::Equal);
            lp.rhs.push_back(ax);
        }
        lp.rows.push_back(std::move(row));
    }
    // box rows keep the program bounded while variables stay x >= 0
    for (int j = 0; j < n; ++j) {
        std::vector<double> row(n, 0.0);
        row[j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.relations.push_back(Relation::LessEqual);
        lp.rhs.push_back(box(rng) + x0[j]);
    }
    lp.lower.assign(n, 0.0);
    lp.upper.assign(n, std::nullopt);
    return lp;
}

/// Layered random DAG with unit capacities and possibly negative costs (no
/// cycles, hence no negative cycles).
inline trackflow::netflow::FlowNetwork random_unit_dag(std::mt19937_64& rng, int max_nodes = 25) {
    using trackflow::netflow::FlowNetwork;
    std::uniform_int_distribution<int> nd(4, max_nodes);
    const int n = nd(rng);
    FlowNetwork net;
    net.node_count = n;
    net.source = 0;
    net.sink = n - 1;
    std::uniform_real_distribution<double> cost(-3.0, 5.0);
    std::uniform_real_distribution<double> p(0.0, 1.0);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            const double density = (u == 0 || v == n - 1) ? 0.5 : 0.35;
            if (p(rng) < density) net.arcs.push_back({u, v, cost(rng), 1});
        }
    return net;
}

}  // namespace oracles

#endif
