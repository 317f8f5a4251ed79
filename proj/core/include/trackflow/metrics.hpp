#ifndef TRACKFLOW_METRICS_HPP
#define TRACKFLOW_METRICS_HPP

#include <string>
#include <utility>
#include <vector>

#include "trackflow/trackgraph.hpp"

namespace trackflow::metrics {

struct ClearConfig {
    double iou_threshold = 0.25;  // inclusive
    double dist_gate = 1.0;       // metres, inclusive; used when boxes are absent
};

/// One-to-one per-frame correspondence: maximum cardinality first, then
/// maximal total IoU (or minimal total distance in ground-plane mode).
struct FrameMatch {
    std::vector<std::pair<int, int>> pairs;  // (gt index, hyp index)
    std::vector<double> overlap;             // IoU, or 1 - dist/gate
    bool distance_mode = false;
};
FrameMatch match_frame(const std::vector<track::Detection>& gt,
                       const std::vector<track::Detection>& hyp, const ClearConfig& config);

struct FrameCounts {
    int frame = 0;
    int gt_count = 0;
    int misses = 0;
    int false_alarms = 0;
    int id_switches = 0;
    int mapped = 0;
    double overlap_sum = 0.0;
};

struct ClearReport {
    double da = 1.0, ta = 1.0, dp = 1.0, tp = 1.0;
    int total_gt = 0, total_misses = 0, total_false_alarms = 0, total_switches = 0,
        total_mapped = 0;
    bool distance_mode = false;
    std::vector<FrameCounts> frames;

    std::string to_text() const;
    std::string to_csv() const;
};

ClearReport evaluate(const std::vector<track::TrackedTrajectory>& gt,
                     const std::vector<track::TrackedTrajectory>& hyp,
                     const ClearConfig& config = {});

}  // namespace trackflow::metrics

#endif
