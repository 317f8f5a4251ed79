#include "trackflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "trackflow/assignment.hpp"

namespace trackflow::metrics {

namespace {

constexpr double kForbidden = 1e6;
constexpr double kDummy = 100.0;  // unmatched penalty; any admissible pair wins

bool boxes_available(const std::vector<track::Detection>& gt,
                     const std::vector<track::Detection>& hyp) {
    for (const auto& d : gt)
        if (!d.bbox) return false;
    for (const auto& d : hyp)
        if (!d.bbox) return false;
    return !gt.empty() && !hyp.empty();
}

}  // namespace

FrameMatch match_frame(const std::vector<track::Detection>& gt,
                       const std::vector<track::Detection>& hyp, const ClearConfig& config) {
    FrameMatch out;
    const int m = static_cast<int>(gt.size());
    const int n = static_cast<int>(hyp.size());
    out.distance_mode = !boxes_available(gt, hyp);
    if (m == 0 || n == 0) return out;

    const int size = m + n;
    std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            double c = kForbidden;
            if (out.distance_mode) {
                const double d = distance(gt[i].pos, hyp[j].pos);
                if (d <= config.dist_gate) c = d;
            } else {
                const double ov = iou(*gt[i].bbox, *hyp[j].bbox);
                if (ov >= config.iou_threshold) c = 1.0 - ov;
            }
            cost[i][j] = c;
        }
    for (int i = 0; i < m; ++i)
        for (int j = n; j < size; ++j) cost[i][j] = kDummy;
    for (int i = m; i < size; ++i)
        for (int j = 0; j < size; ++j) cost[i][j] = (j < n) ? kDummy : 0.0;

    const std::vector<int> assignment = assign::hungarian(cost);
    for (int i = 0; i < m; ++i) {
        const int j = assignment[i];
        if (j >= n || cost[i][j] >= kForbidden) continue;
        out.pairs.emplace_back(i, j);
        if (out.distance_mode)
            out.overlap.push_back(1.0 - distance(gt[i].pos, hyp[j].pos) / config.dist_gate);
        else
            out.overlap.push_back(iou(*gt[i].bbox, *hyp[j].bbox));
    }
    return out;
}

ClearReport evaluate(const std::vector<track::TrackedTrajectory>& gt,
                     const std::vector<track::TrackedTrajectory>& hyp,
                     const ClearConfig& config) {
    // Per frame: (trajectory id, detection) for both sides.
    std::map<int, std::vector<std::pair<int, track::Detection>>> gt_frames, hyp_frames;
    for (const auto& t : gt)
        for (const auto& d : t.detections) gt_frames[d.frame].push_back({t.id, d});
    for (const auto& t : hyp)
        for (const auto& d : t.detections) hyp_frames[d.frame].push_back({t.id, d});

    ClearReport rep;
    std::map<int, int> last_hyp;  // gt id -> last matched hyp id, never reset
    double ta_penalty = 0.0;
    double dp_sum = 0.0;
    int dp_frames = 0;
    double tp_overlap = 0.0;

    std::vector<int> frames;
    for (const auto& [f, v] : gt_frames) frames.push_back(f);
    for (const auto& [f, v] : hyp_frames)
        if (!gt_frames.count(f)) frames.push_back(f);
    std::sort(frames.begin(), frames.end());

    for (int f : frames) {
        const auto& g = gt_frames[f];
        const auto& h = hyp_frames[f];
        std::vector<track::Detection> gd, hd;
        for (const auto& [id, d] : g) gd.push_back(d);
        for (const auto& [id, d] : h) hd.push_back(d);
        const FrameMatch match = match_frame(gd, hd, config);
        rep.distance_mode = match.distance_mode || rep.distance_mode;

        FrameCounts fc;
        fc.frame = f;
        fc.gt_count = static_cast<int>(g.size());
        fc.mapped = static_cast<int>(match.pairs.size());
        fc.misses = static_cast<int>(g.size()) - fc.mapped;
        fc.false_alarms = static_cast<int>(h.size()) - fc.mapped;
        for (std::size_t k = 0; k < match.pairs.size(); ++k) {
            const int gt_id = g[match.pairs[k].first].first;
            const int hyp_id = h[match.pairs[k].second].first;
            auto it = last_hyp.find(gt_id);
            if (it != last_hyp.end() && it->second != hyp_id) ++fc.id_switches;
            last_hyp[gt_id] = hyp_id;
            fc.overlap_sum += match.overlap[k];
        }

        rep.total_gt += fc.gt_count;
        rep.total_misses += fc.misses;
        rep.total_false_alarms += fc.false_alarms;
        rep.total_switches += fc.id_switches;
        rep.total_mapped += fc.mapped;
        ta_penalty += fc.misses + fc.false_alarms + std::log10(1.0 + fc.id_switches);
        if (fc.mapped > 0) {
            dp_sum += fc.overlap_sum / fc.mapped;
            ++dp_frames;
        }
        tp_overlap += fc.overlap_sum;
        rep.frames.push_back(fc);
    }

    if (rep.total_gt > 0) {
        rep.da = 1.0 - static_cast<double>(rep.total_misses + rep.total_false_alarms) /
                           rep.total_gt;
        rep.ta = 1.0 - ta_penalty / rep.total_gt;
    }
    rep.dp = dp_frames > 0 ? dp_sum / dp_frames : 0.0;
    rep.tp = rep.total_mapped > 0 ? tp_overlap / rep.total_mapped : 0.0;
    return rep;
}

std::string ClearReport::to_text() const {
    std::ostringstream os;
    os << "CLEAR report (" << (distance_mode ? "ground-plane" : "bounding-box") << " matching)\n";
    os << "  DA  " << da << "\n";
    os << "  TA  " << ta << "\n";
    os << "  DP  " << dp << "\n";
    os << "  TP  " << tp << "\n";
    os << "  gt " << total_gt << "  misses " << total_misses << "  false alarms "
       << total_false_alarms << "  id switches " << total_switches << "  mapped " << total_mapped
       << "\n";
    return os.str();
}

std::string ClearReport::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "metric,value\n";
    os << "DA," << da << "\nTA," << ta << "\nDP," << dp << "\nTP," << tp << "\n";
    os << "misses," << total_misses << "\nfalse_alarms," << total_false_alarms << "\n";
    os << "id_switches," << total_switches << "\ngt_detections," << total_gt << "\n";
    os << "mapped," << total_mapped << "\nmode," << (distance_mode ? "distance" : "iou") << "\n";
    return os.str();
}

}  // namespace trackflow::metrics
