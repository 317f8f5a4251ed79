#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "trackflow/trackgraph.hpp"

using namespace trackflow;
using namespace trackflow::track;

namespace {

Detection det(int frame, double x, double y, double conf = 0.9, int id = -1) {
    Detection d;
    d.frame = frame;
    d.pos = {x, y, 0.0};
    d.confidence = conf;
    d.id = id >= 0 ? id : frame * 100 + static_cast<int>(x * 10);
    return d;
}

CostParams default_params() {
    CostParams p;
    p.v_max = 7.0;
    p.f_max = 3;  // keeps the enumeration oracle tractable
    p.b_j = 0.3;
    p.frame_period = 0.4;
    return p;
}

// Two walkers five frames long, far apart, straight lines.
std::vector<Detection> parallel_walkers() {
    std::vector<Detection> dets;
    for (int f = 0; f < 5; ++f) {
        dets.push_back(det(f, 0.5 * f, 0.0, 0.9, f * 10));
        dets.push_back(det(f, 0.5 * f, 5.0, 0.9, f * 10 + 1));
    }
    return dets;
}

// Two walkers crossing in x with lateral clearance; the rightward one is
// occluded for one frame right at the crossing.
std::vector<Detection> crossing_with_gap() {
    std::vector<Detection> dets;
    for (int f = 0; f < 6; ++f) {
        if (f != 3) dets.push_back(det(f, 0.6 * f, 0.0, 0.92, f * 10));            // rightward
        dets.push_back(det(f, 3.0 - 0.6 * f, 1.6 - 0.1 * f, 0.92, f * 10 + 1));    // leftward
    }
    return dets;
}

// A co-moving pair plus a lone crossing walker (uneven numbers avoid ties).
std::vector<Detection> group_scene() {
    std::vector<Detection> dets;
    for (int f = 0; f < 5; ++f) {
        dets.push_back(det(f, 0.5 * f, 0.0, 0.9, f * 10));
        dets.push_back(det(f, 0.5 * f, 0.6, 0.9, f * 10 + 1));
        dets.push_back(det(f, 2.0 - 0.5 * f, 1.83 - 0.41 * f, 0.91, f * 10 + 2));
    }
    return dets;
}

std::set<std::vector<int>> id_sets(const std::vector<Trajectory>& ts,
                                   const std::vector<Detection>& dets) {
    std::set<std::vector<int>> out;
    for (const auto& t : ts) {
        std::vector<int> ids;
        for (int k : t.det_indices) ids.push_back(dets[k].id);
        out.insert(ids);
    }
    return out;
}

void check_against_oracle(const std::vector<Detection>& dets, const CostParams& params) {
    const TrackingGraph graph = build(dets, params);
    const std::vector<Trajectory> got = solve_tracking(graph);
    oracles::MapOracle oracle(graph);
    const oracles::MapOracleResult best = oracle.solve();

    double got_cost = 0.0;
    for (const auto& t : got) got_cost += t.cost;
    CHECK(got_cost == doctest::Approx(best.best_cost).epsilon(1e-9));

    // identical trajectory sets, compared as detection-id sequences
    std::set<std::vector<int>> oracle_sets;
    for (const auto& chain : best.best_set) {
        std::vector<int> ids;
        for (int k : chain) ids.push_back(graph.detections[k].id);
        oracle_sets.insert(ids);
    }
    CHECK(id_sets(got, graph.detections) == oracle_sets);

    // the LP route agrees as well
    const std::vector<Trajectory> via_lp = solve_tracking_via_lp(graph);
    double lp_cost = 0.0;
    for (const auto& t : via_lp) lp_cost += t.cost;
    CHECK(lp_cost == doctest::Approx(best.best_cost).epsilon(1e-9));
    CHECK(id_sets(via_lp, graph.detections) == id_sets(got, graph.detections));
}

}  // namespace

TEST_CASE("gauss error mapping hits the documented anchor points") {
    const double vmax = 7.0;
    CHECK(gauss_error(vmax / 2.0, vmax) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gauss_error(0.0, vmax) == doctest::Approx(0.997661).epsilon(1e-6));
    CHECK(gauss_error(vmax, vmax) == doctest::Approx(0.002339).epsilon(1e-3));
    // erf oddness: E(m - d) + E(m + d) = 1
    for (double d : {0.3, 1.1, 2.9})
        CHECK(gauss_error(vmax / 2 - d, vmax) + gauss_error(vmax / 2 + d, vmax) ==
              doctest::Approx(1.0).epsilon(1e-12));
    // monotone decreasing over a fine grid
    double prev = gauss_error(0.0, vmax);
    for (int i = 1; i <= 1000; ++i) {
        const double cur = gauss_error(2.0 * vmax * i / 1000.0, vmax);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("link cost: motion term, frame-gap term, pruning") {
    const CostParams p = default_params();
    const Detection a = det(0, 1.0, 1.0);

    // coincident positions one frame apart: just -log E(0, vmax)
    CHECK(link_cost(a, det(1, 1.0, 1.0), p) == doctest::Approx(0.002342).epsilon(1e-3));
    // single-frame gap contributes nothing beyond the motion term
    const Detection b = det(1, 1.8, 1.0);
    const double speed = 0.8 / p.dt(1);
    CHECK(link_cost(a, b, p) ==
          doctest::Approx(-std::log(gauss_error(speed, p.v_max))).epsilon(1e-12));
    // a three-frame gap adds -log(Bj^2)
    const Detection c = det(3, 1.8, 1.0);
    const double speed3 = 0.8 / p.dt(3);
    CHECK(link_cost(a, c, p) ==
          doctest::Approx(-std::log(gauss_error(speed3, p.v_max)) - std::log(0.09))
              .epsilon(1e-9));
    CHECK(-std::log(0.09) == doctest::Approx(2.4079).epsilon(1e-4));

    // inadmissible pairs
    CHECK(link_cost(b, a, p) == netflow::kInf);                       // backwards in time
    CHECK(link_cost(a, det(12, 1.0, 1.0), p) == netflow::kInf);       // beyond Fmax
    CHECK(link_cost(a, det(1, 1.0 + p.v_max * p.dt(1) + 0.1, 1.0), p) ==
          netflow::kInf);                                             // faster than Vmax
}

TEST_CASE("detection cost with and without entry points") {
    CostParams p = default_params();
    CHECK(detection_cost(det(0, 0, 0, 0.5), p) == doctest::Approx(-0.6931).epsilon(1e-4));

    p.entry_points = {{0.0, 0.0, 0.0}};
    // distance exactly BBmin: border term log(1) = 0
    CHECK(detection_cost(det(0, p.bb_min, 0, 0.5), p) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));
    // closer than BBmin: term omitted
    CHECK(detection_cost(det(0, 0.5, 0, 0.5), p) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));
    // farther: log(0.1) + log(1.5/3.0)
    CHECK(detection_cost(det(0, 3.0, 0, 0.9), p) ==
          doctest::Approx(std::log(0.1) + std::log(0.5)).epsilon(1e-9));
    CHECK(std::log(0.1) + std::log(0.5) == doctest::Approx(-2.9957).epsilon(1e-4));
}

TEST_CASE("graph construction counts") {
    const CostParams p = default_params();
    SUBCASE("one admissible pair gives one link arc") {
        const TrackingGraph g = build({det(0, 0, 0), det(1, 0.5, 0)}, p);
        CHECK(g.detection_arc_count == 2);
        CHECK(g.link_arc_count == 1);
    }
    SUBCASE("a pair beyond the speed gate gives none") {
        const TrackingGraph g = build({det(0, 0, 0), det(1, 10.0, 0)}, p);
        CHECK(g.link_arc_count == 0);
    }
    SUBCASE("detections sharing a frame never link") {
        std::vector<Detection> dets;
        for (int i = 0; i < 4; ++i) dets.push_back(det(0, 0.1 * i, 0, 0.9, i));
        const TrackingGraph g = build(dets, p);
        CHECK(g.link_arc_count == 0);
    }
    SUBCASE("empty input yields only the terminals") {
        const TrackingGraph g = build({}, p);
        CHECK(g.net.node_count == 2);
        CHECK(g.net.arcs.empty());
        CHECK(solve_tracking(g).empty());
    }
}

TEST_CASE("a single detection cannot form a trajectory") {
    const TrackingGraph g = build({det(0, 0, 0, 0.99)}, default_params());
    CHECK(solve_tracking(g).empty());
}

TEST_CASE("parallel walkers match the exhaustive MAP optimum") {
    const std::vector<Detection> dets = parallel_walkers();
    check_against_oracle(dets, default_params());
    const TrackingGraph g = build(dets, default_params());
    const std::vector<Trajectory> ts = solve_tracking(g);
    REQUIRE(ts.size() == 2);
    for (const auto& t : ts) CHECK(t.det_indices.size() == 5);
    // ground-truth identities: constant parity of the detection id
    for (const auto& t : ts) {
        const int parity = g.detections[t.det_indices[0]].id % 10;
        for (int k : t.det_indices) CHECK(g.detections[k].id % 10 == parity);
    }
}

TEST_CASE("a two-frame occlusion is bridged and identities survive") {
    const std::vector<Detection> dets = crossing_with_gap();
    check_against_oracle(dets, default_params());
    const TrackingGraph g = build(dets, default_params());
    const std::vector<Trajectory> ts = solve_tracking(g);
    REQUIRE(ts.size() == 2);
    for (const auto& t : ts) {
        const int parity = g.detections[t.det_indices[0]].id % 10;
        for (int k : t.det_indices) CHECK(g.detections[k].id % 10 == parity);
        // consecutive gaps within Fmax
        for (std::size_t k = 1; k < t.det_indices.size(); ++k)
            CHECK(g.detections[t.det_indices[k]].frame -
                      g.detections[t.det_indices[k - 1]].frame <=
                  default_params().f_max);
    }
}

TEST_CASE("the group scene matches the oracle too") {
    check_against_oracle(group_scene(), default_params());
}

TEST_CASE("no detection is shared and flows are integral") {
    const TrackingGraph g = build(crossing_with_gap(), default_params());
    const std::vector<Trajectory> ts = solve_tracking(g);
    std::set<int> used;
    for (const auto& t : ts)
        for (int k : t.det_indices) CHECK(used.insert(k).second);
}

TEST_CASE("raising the speed gate never increases the optimal cost") {
    const std::vector<Detection> dets = crossing_with_gap();
    CostParams slow = default_params();
    slow.v_max = 3.0;
    CostParams fast = default_params();
    fast.v_max = 9.0;
    const std::vector<Trajectory> ts_slow = solve_tracking(build(dets, slow));
    const std::vector<Trajectory> ts_fast = solve_tracking(build(dets, fast));
    double cost_slow = 0.0, cost_fast = 0.0;
    for (const auto& t : ts_slow) cost_slow += t.cost;
    for (const auto& t : ts_fast) cost_fast += t.cost;
    CHECK(cost_fast <= cost_slow + 1e-9);
}

TEST_CASE("tracking output is deterministic") {
    const std::vector<Detection> dets = group_scene();
    const TrackingGraph g1 = build(dets, default_params());
    const TrackingGraph g2 = build(dets, default_params());
    const std::vector<Trajectory> a = solve_tracking(g1);
    const std::vector<Trajectory> b = solve_tracking(g2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].det_indices == b[i].det_indices);
        CHECK(a[i].cost == b[i].cost);
        CHECK(a[i].id == b[i].id);
    }
    // ordering by first detection index
    for (std::size_t i = 1; i < a.size(); ++i)
        CHECK(a[i - 1].det_indices.front() < a[i].det_indices.front());
}
