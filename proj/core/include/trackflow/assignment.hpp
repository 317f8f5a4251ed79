#ifndef TRACKFLOW_ASSIGNMENT_HPP
#define TRACKFLOW_ASSIGNMENT_HPP

#include <array>
#include <utility>
#include <vector>

#include "trackflow/geometry.hpp"
#include "trackflow/trackgraph.hpp"

namespace trackflow::assign {

/// Minimum-cost perfect matching on a square cost matrix (potential-based
/// Hungarian, O(n^3)); returns the column assigned to each row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<int>& assignment);

struct VolumeBounds {
    double xmin = 0, xmax = 0;
    double ymin = 0, ymax = 0;
    double zmin = 0, zmax = 0;
};

/// Distance to the nearest field-of-view border; the lower z face is never a
/// border (nothing enters or leaves there) and degenerate axes are skipped.
double border_distance(const Vec3& p, const VolumeBounds& b);

struct Particle {
    int id = -1;
    Vec3 pos;
};

/// (M+N)-square matrix: the M x N block holds pairwise distances (entries
/// above v_thresh are forbidden), the appended rows/columns hold each
/// particle's border distance on its own diagonal, and the corner block is 0.
struct AugmentedCostMatrix {
    std::vector<std::vector<double>> cost;
    int m = 0;  // particles in frame f
    int n = 0;  // particles in frame f+1
};
AugmentedCostMatrix augment_in_out(const std::vector<Particle>& frame_f,
                                   const std::vector<Particle>& frame_f1,
                                   const VolumeBounds& bounds, double v_thresh);

/// Particle-to-particle matches surviving the IN/OUT assignment; particles
/// matched to their IN/OUT state are left out.
std::vector<std::pair<int, int>> match_in_out(const std::vector<Particle>& frame_f,
                                              const std::vector<Particle>& frame_f1,
                                              const VolumeBounds& bounds, double v_thresh);

struct MlhParams {
    VolumeBounds bounds;
    double v_thresh = 2.8;  // metres per single-frame gap; scaled by the gap
};

/// Candidate-trajectory table over the 5-frame window [i-2 .. i+2]; a
/// particle id appears at most once per column.
struct ParticleTable {
    struct Cell {
        bool present = false;
        int id = -1;
        Vec3 pos;
        bool synthetic = false;  // interpolated by the adding iteration
    };
    std::vector<std::array<Cell, 5>> rows;
    int center_frame = 0;  // frame of column 2
};

/// Hierarchical five-level matching filling the table: levels 1-2 anchor
/// rows at the frame of study, levels 3-5 recover particles missing there.
ParticleTable multi_level_match(const std::array<std::vector<Particle>, 5>& frames,
                                int center_frame, const MlhParams& params);

/// Fills interior gaps of rows holding at least 3 particles (never the first
/// or last cell of a row) with linearly interpolated positions; repeats until
/// no additions. Returns the number of cells added.
int add_iteration(ParticleTable& table, int& next_synthetic_id);

/// Deletes outliers: rows present at the frame of study with fewer than 3
/// particles lose their cells in columns i-1, i, i+1; repeats until no
/// deletions. Returns the number of cells removed.
int delete_iteration(ParticleTable& table);

/// Full multi-level-Hungarian tracker: slides the window over the sequence,
/// applies match/add/delete, then links the refined particles frame-to-frame
/// with the IN/OUT Hungarian.
std::vector<track::TrackedTrajectory> track_mlh(const std::vector<track::Detection>& dets,
                                                const MlhParams& params);

/// Frame-by-frame Hungarian baseline (no window refinement).
std::vector<track::TrackedTrajectory> track_hungarian(const std::vector<track::Detection>& dets,
                                                      const MlhParams& params);

}  // namespace trackflow::assign

#endif
