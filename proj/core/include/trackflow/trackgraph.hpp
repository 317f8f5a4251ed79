#ifndef TRACKFLOW_TRACKGRAPH_HPP
#define TRACKFLOW_TRACKGRAPH_HPP

#include <functional>
#include <optional>
#include <vector>

#include "trackflow/geometry.hpp"
#include "trackflow/netflow.hpp"

namespace trackflow::track {

struct Detection {
    int frame = 0;
    Vec3 pos;
    double confidence = 0.9;  // clamped into [1e-6, 1-1e-6] on ingestion
    std::optional<BBox> bbox;  // metrics only
    int id = -1;
};

struct CostParams {
    double v_max = 7.0;        // m/s
    int f_max = 10;            // max link frame gap
    double b_j = 0.3;          // frame-gap base
    double bb_min = 1.5;       // m, border-term threshold
    std::vector<Vec3> entry_points;
    double frame_period = 0.4;  // seconds per frame

    double dt(int frame_gap) const { return frame_period * frame_gap; }
};

/// Probability that a displacement speed is plausible for a pedestrian:
/// 1/2 + 1/2 erf((-v + Vmax/2) / (Vmax/4)); monotone decreasing in v.
double gauss_error(double speed, double v_max);

/// -log E(||pj-pi||/dt, Vmax) - log(Bj^(df-1)). Returns +inf (arc omitted)
/// when the pair is inadmissible: df out of [1, Fmax], speed above Vmax, or
/// the probability underflowing below 1e-12.
double link_cost(const Detection& a, const Detection& b, const CostParams& params);

/// log(1 - Pdet) plus, when entry points are configured and the detection is
/// farther than BBmin from all of them, log(BBmin / nearest-entry-distance).
double detection_cost(const Detection& d, const CostParams& params);

/// Min-cost-flow graph over detections: per detection a begin/end node pair
/// joined by the detection arc, link arcs between admissible pairs, and the
/// orientation where the source feeds END nodes and BEGIN nodes drain to the
/// sink so that entering/exiting flow bypasses the negative detection arc.
/// Each begin/end node carries a unit capacity, realized as the usual
/// two-half split with a middle arc, so one detection serves one trajectory.
struct TrackingGraph {
    netflow::FlowNetwork net;
    std::vector<Detection> detections;  // sorted by (frame, id)
    CostParams params;

    // Node layout per detection k: begin half-pair (2+4k -> 3+4k), end
    // half-pair (4+4k -> 5+4k). Link arcs leave 5+4k and enter 2+4j.
    int begin_in(int k) const { return 2 + 4 * k; }
    int begin_out(int k) const { return 3 + 4 * k; }
    int end_in(int k) const { return 4 + 4 * k; }
    int end_out(int k) const { return 5 + 4 * k; }
    static int node_detection(int node) { return (node - 2) / 4; }

    int detection_arc_count = 0;
    int link_arc_count = 0;

    // Arc layout bookkeeping for cost overrides and flow decoding.
    struct LinkArc {
        int from_det, to_det;
        int arc_index;
    };
    std::vector<LinkArc> link_arcs;
};

/// Extra cost added on top of the motion term of a link arc (social terms);
/// returning +inf prunes the arc.
using LinkCostOverride = std::function<double(int from_det, int to_det)>;

TrackingGraph build(std::vector<Detection> dets, const CostParams& params,
                    const LinkCostOverride& extra_link_cost = nullptr);

struct Trajectory {
    int id = 0;
    std::vector<int> det_indices;  // into TrackingGraph::detections
    double cost = 0.0;
};

/// Trajectory carrying its detections, the currency between trackers,
/// metrics and file I/O.
struct TrackedTrajectory {
    int id = 0;
    std::vector<Detection> detections;  // frame-ordered
    double cost = 0.0;
};

/// Pushes unit flows while the marginal path cost stays negative and decodes
/// them into trajectories; asserts the flow constraint system on the result.
std::vector<Trajectory> solve_tracking(const TrackingGraph& graph);

/// Same optimum through the explicit LP (oracle path); guarded to small
/// instances.
std::vector<Trajectory> solve_tracking_via_lp(const TrackingGraph& graph);

double total_cost(const std::vector<Trajectory>& trajectories);

}  // namespace trackflow::track

#endif
