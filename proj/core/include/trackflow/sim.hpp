#ifndef TRACKFLOW_SIM_HPP
#define TRACKFLOW_SIM_HPP

#include <cstdint>
#include <vector>

#include "trackflow/trackgraph.hpp"

namespace trackflow::sim {

struct ScenarioSpec {
    int walkers = 15;
    int frames = 50;
    std::vector<int> group_sizes;   // walkers assigned to groups from the front
    double scene_size = 20.0;       // square scene side, metres
    double fps = 2.5;
    double walker_speed = 1.4;      // m/s, constant per walker
    double heading_sigma = 0.15;    // radians of per-frame heading jitter
    double group_spacing = 0.6;     // lateral spacing inside a group
    std::uint64_t seed = 0;
};

struct Scenario {
    ScenarioSpec spec;
    std::vector<track::TrackedTrajectory> ground_truth;  // one per walker
    std::vector<int> walker_group;                       // 0 = ungrouped
};

/// Constant-speed walkers with Gaussian heading jitter; group members share
/// the base heading and keep a fixed lateral offset. Deterministic per seed.
Scenario generate(const ScenarioSpec& spec);

struct PerturbationSpec {
    double missing = 0.0;      // drop probability per detection
    double outliers = 0.0;     // added count as a fraction of the detections
    double noise_var = 0.0;    // positional variance as a fraction of scene size
    double confidence = 0.9;   // emitted detection confidence
    std::uint64_t seed = 0;
};

/// Detections from the ground truth with dropped entries, uniform outliers
/// (fresh ids) and zero-mean Gaussian position noise. Frames never move.
std::vector<track::Detection> perturb(const Scenario& scenario, const PerturbationSpec& spec);

}  // namespace trackflow::sim

#endif
