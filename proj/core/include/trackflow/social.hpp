#ifndef TRACKFLOW_SOCIAL_HPP
#define TRACKFLOW_SOCIAL_HPP

#include <vector>

#include "trackflow/geometry.hpp"
#include "trackflow/trackgraph.hpp"

namespace trackflow::social {

struct SocialParams {
    double alpha = 0.5;          // avoidance decay
    double neighborhood = 1.0;   // m, avoidance radius
    int max_iterations = 6;      // M_i
    int batch_frames = 100;
    int batch_overlap = 10;
    bool use_sfm = true;
    bool use_groups = true;
    bool use_lp_solver = false;  // route flow solves through the LP oracle

    // Group-vs-individual likelihood model: products of Gaussians over
    // pairwise distance and speed difference.
    double group_dist_mean = 0.75;
    double group_dist_std = 0.5;
    double group_speed_std = 0.3;
    double indiv_dist_mean = 4.0;
    double indiv_dist_std = 2.0;
    double indiv_speed_std = 1.5;

    void validate() const;
};

/// Position extrapolated by the constant-velocity assumption.
Vec3 predict_cv(const Vec3& p, const Vec3& v, double dt);

struct Neighbor {
    Vec3 predicted;
    int group = 0;
};

/// Repulsion exerted on pedestrian i by non-group members predicted within
/// the neighborhood radius: sum of exp(-dist/(alpha*dt)) along the unit
/// vector from the neighbor toward i. Coincident points repel along +x.
Vec3 avoidance_acceleration(const Vec3& predicted_i, int group_i,
                            const std::vector<Neighbor>& others, const SocialParams& params,
                            double dt);

/// Position extrapolated with the avoidance acceleration folded in.
Vec3 predict_sfm(const Vec3& p, const Vec3& v, const Vec3& accel, double dt);

/// -log E(||predicted - measured||/dt, Vmax); +inf when the probability
/// underflows (the arc is pruned).
double sfm_cost(const Vec3& predicted, const Vec3& measured, double dt, double v_max);

/// Grouping term: the position predicted from the mean velocity of the other
/// co-visible group members; zero (term omitted) when there are none.
double group_cost(const Vec3& p_i, const std::vector<Vec3>& other_member_velocities,
                  const Vec3& measured, double dt, double v_max);

struct TrackSample {
    int frame = 0;
    Vec3 pos;
    bool has_velocity = false;
    Vec3 velocity;
};

/// Pairwise group detection over co-visible frames: tracks whose summed
/// per-frame group likelihood beats the summed individual one are merged;
/// the transitive closure yields labels (0 = ungrouped, groups from 1).
std::vector<int> detect_groups(const std::vector<std::vector<TrackSample>>& tracks,
                               const SocialParams& params);

using TrackedTrajectory = track::TrackedTrajectory;

struct EmResult {
    std::vector<TrackedTrajectory> trajectories;
    int iterations_used = 0;
    bool converged = true;
    int batches = 1;
};

/// Iterative tracking: the first solve uses only distance information, later
/// ones add the social and grouping costs on single-frame links, with
/// velocities and group labels re-estimated from the previous iterate. Long
/// sequences are cut into overlapping batches whose trajectories are stitched
/// by shared detection ids.
EmResult em_track(const std::vector<track::Detection>& dets, const track::CostParams& cost_params,
                  const SocialParams& social_params);

}  // namespace trackflow::social

#endif
