#include "trackflow/social.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace trackflow::social {

namespace {

constexpr double kProbFloor = 1e-12;

double gauss_density(double x, double mean, double std) {
    const double z = (x - mean) / std;
    return std::exp(-0.5 * z * z) / (std * std::sqrt(2.0 * M_PI));
}

}  // namespace

void SocialParams::validate() const {
    if (alpha <= 0.0) throw std::invalid_argument("social: alpha must be positive");
    if (max_iterations < 1) throw std::invalid_argument("social: need at least one iteration");
    if (batch_overlap >= batch_frames)
        throw std::invalid_argument("social: overlap must be smaller than the batch length");
}

Vec3 predict_cv(const Vec3& p, const Vec3& v, double dt) { return p + v * dt; }

Vec3 avoidance_acceleration(const Vec3& predicted_i, int group_i,
                            const std::vector<Neighbor>& others, const SocialParams& params,
                            double dt) {
    Vec3 accel;
    for (const Neighbor& m : others) {
        // label 0 means ungrouped, not a shared group
        if (group_i != 0 && m.group == group_i) continue;
        const Vec3 away = predicted_i - m.predicted;
        const double dist = away.norm();
        if (dist > params.neighborhood) continue;
        const double magnitude = std::exp(-dist / (params.alpha * dt));
        Vec3 dir{1.0, 0.0, 0.0};  // coincident points repel along +x
        if (dist > 1e-12) dir = away * (1.0 / dist);
        accel += dir * magnitude;
    }
    return accel;
}

Vec3 predict_sfm(const Vec3& p, const Vec3& v, const Vec3& accel, double dt) {
    return p + (v + accel * dt) * dt;
}

double sfm_cost(const Vec3& predicted, const Vec3& measured, double dt, double v_max) {
    const double e = track::gauss_error(distance(predicted, measured) / dt, v_max);
    if (e < kProbFloor) return netflow::kInf;
    return -std::log(e);
}

double group_cost(const Vec3& p_i, const std::vector<Vec3>& other_member_velocities,
                  const Vec3& measured, double dt, double v_max) {
    if (other_member_velocities.empty()) return 0.0;
    Vec3 mean_v;
    for (const Vec3& v : other_member_velocities) mean_v += v;
    mean_v = mean_v * (1.0 / static_cast<double>(other_member_velocities.size()));
    const Vec3 predicted = p_i + mean_v * dt;
    return sfm_cost(predicted, measured, dt, v_max);
}

namespace {

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<int> detect_groups(const std::vector<std::vector<TrackSample>>& tracks,
                               const SocialParams& params) {
    const int n = static_cast<int>(tracks.size());
    DisjointSet ds(n);
    for (int a = 0; a < n; ++a) {
        std::map<int, const TrackSample*> by_frame;
        for (const TrackSample& s : tracks[a]) by_frame[s.frame] = &s;
        for (int b = a + 1; b < n; ++b) {
            // Per-frame likelihoods are summed, not multiplied, so a few
            // frames of separation cannot erase a long co-walking stretch.
            double pg_sum = 0.0, pi_sum = 0.0;
            int covisible = 0;
            for (const TrackSample& sb : tracks[b]) {
                auto it = by_frame.find(sb.frame);
                if (it == by_frame.end()) continue;
                const TrackSample& sa = *it->second;
                ++covisible;
                const double dist = distance(sa.pos, sb.pos);
                double pg = gauss_density(dist, params.group_dist_mean, params.group_dist_std);
                double pi = gauss_density(dist, params.indiv_dist_mean, params.indiv_dist_std);
                if (sa.has_velocity && sb.has_velocity) {
                    const double dv = (sa.velocity - sb.velocity).norm();
                    pg *= gauss_density(dv, 0.0, params.group_speed_std);
                    pi *= gauss_density(dv, 0.0, params.indiv_speed_std);
                }
                pg_sum += pg;
                pi_sum += pi;
            }
            if (covisible >= 2 && pg_sum > pi_sum) ds.unite(a, b);
        }
    }
    // Components of size >= 2 get labels 1.. in order of their smallest member.
    std::vector<int> labels(n, 0);
    std::map<int, std::vector<int>> components;
    for (int v = 0; v < n; ++v) components[ds.find(v)].push_back(v);
    int next = 1;
    for (int v = 0; v < n; ++v) {
        const auto& comp = components[ds.find(v)];
        if (comp.size() < 2 || labels[v] != 0) continue;
        for (int member : comp) labels[member] = next;
        ++next;
    }
    return labels;
}

namespace {

using track::Detection;
using track::Trajectory;

// Per-detection latent state estimated from the previous iterate.
struct DetState {
    int traj = -1;
    bool has_velocity = false;
    Vec3 velocity;
    int group = 0;
};

std::vector<DetState> estimate_states(const std::vector<Detection>& dets,
                                      const std::vector<Trajectory>& trajectories,
                                      const track::CostParams& cp, const SocialParams& sp) {
    std::vector<DetState> st(dets.size());
    std::vector<std::vector<TrackSample>> tracks(trajectories.size());
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        const auto& idx = trajectories[t].det_indices;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            DetState& s = st[idx[k]];
            s.traj = static_cast<int>(t);
            if (k > 0) {
                const Detection& prev = dets[idx[k - 1]];
                const Detection& cur = dets[idx[k]];
                const double dt = cp.dt(cur.frame - prev.frame);
                s.has_velocity = dt > 0;
                if (s.has_velocity) s.velocity = (cur.pos - prev.pos) * (1.0 / dt);
            }
            tracks[t].push_back({dets[idx[k]].frame, dets[idx[k]].pos, st[idx[k]].has_velocity,
                                 st[idx[k]].velocity});
        }
    }
    if (sp.use_groups) {
        const std::vector<int> labels = detect_groups(tracks, sp);
        // Groups begin and end: a member detection carries the label only at
        // frames where the group likelihood locally dominates against some
        // co-visible member, so a corrupted tail cannot drag the label along.
        for (std::size_t i = 0; i < dets.size(); ++i) {
            DetState& s = st[i];
            if (s.traj < 0 || labels[s.traj] == 0) continue;
            bool active = false;
            for (std::size_t j = 0; j < dets.size() && !active; ++j) {
                if (i == j || dets[j].frame != dets[i].frame) continue;
                const DetState& o = st[j];
                if (o.traj < 0 || o.traj == s.traj || labels[o.traj] != labels[s.traj]) continue;
                const double dist = distance(dets[i].pos, dets[j].pos);
                double pg = gauss_density(dist, sp.group_dist_mean, sp.group_dist_std);
                double pi = gauss_density(dist, sp.indiv_dist_mean, sp.indiv_dist_std);
                if (s.has_velocity && o.has_velocity) {
                    const double dv = (s.velocity - o.velocity).norm();
                    pg *= gauss_density(dv, 0.0, sp.group_speed_std);
                    pi *= gauss_density(dv, 0.0, sp.indiv_speed_std);
                }
                active = pg > pi;
            }
            if (active) s.group = labels[s.traj];
        }
    }
    return st;
}

// Social extra cost on the link from detection `from` to `to`, per the
// previous iterate's states. Applied only on single-frame links; the first
// observation of a track has no velocity and keeps the plain distance cost.
double social_link_cost(const std::vector<Detection>& dets, const std::vector<DetState>& st,
                        const std::vector<std::vector<int>>& dets_by_frame_index, int from, int to,
                        const track::CostParams& cp, const SocialParams& sp) {
    if (dets[to].frame - dets[from].frame != 1) return 0.0;
    const DetState& s = st[from];
    if (!s.has_velocity) return 0.0;
    const double dt = cp.dt(1);

    double extra = 0.0;
    if (sp.use_sfm) {
        std::vector<Neighbor> neighbors;
        for (int other : dets_by_frame_index[dets[from].frame]) {
            if (other == from || !st[other].has_velocity) continue;
            neighbors.push_back(
                {predict_cv(dets[other].pos, st[other].velocity, dt), st[other].group});
        }
        const Vec3 predicted_i = predict_cv(dets[from].pos, s.velocity, dt);
        const Vec3 accel = avoidance_acceleration(predicted_i, s.group, neighbors, sp, dt);
        const Vec3 p_sfm = predict_sfm(dets[from].pos, s.velocity, accel, dt);
        extra += sfm_cost(p_sfm, dets[to].pos, dt, cp.v_max);
    }
    if (sp.use_groups && s.group != 0) {
        std::vector<Vec3> member_velocities;
        for (int other : dets_by_frame_index[dets[from].frame]) {
            if (other == from || st[other].group != s.group || !st[other].has_velocity) continue;
            member_velocities.push_back(st[other].velocity);
        }
        extra += group_cost(dets[from].pos, member_velocities, dets[to].pos, dt, cp.v_max);
    }
    return extra;
}

std::vector<std::vector<int>> canonical(const std::vector<Trajectory>& ts,
                                        const std::vector<Detection>& dets) {
    std::vector<std::vector<int>> enc;
    for (const Trajectory& t : ts) {
        std::vector<int> ids;
        for (int k : t.det_indices) ids.push_back(dets[k].id);
        enc.push_back(std::move(ids));
    }
    std::sort(enc.begin(), enc.end());
    return enc;
}

struct BatchResult {
    std::vector<TrackedTrajectory> trajectories;
    int iterations = 0;
    bool converged = false;
};

BatchResult run_batch(const std::vector<Detection>& batch_dets, const track::CostParams& cp,
                      const SocialParams& sp) {
    BatchResult out;
    if (batch_dets.empty()) {
        out.converged = true;
        return out;
    }

    track::TrackingGraph graph = track::build(batch_dets, cp);
    const std::vector<Detection>& dets = graph.detections;  // sorted copy
    int max_frame = 0;
    for (const Detection& d : dets) max_frame = std::max(max_frame, d.frame);
    std::vector<std::vector<int>> by_frame(max_frame + 1);
    for (std::size_t i = 0; i < dets.size(); ++i) by_frame[dets[i].frame].push_back(static_cast<int>(i));

    auto solve = [&](const track::TrackingGraph& g) {
        return sp.use_lp_solver ? track::solve_tracking_via_lp(g) : track::solve_tracking(g);
    };
    std::vector<Trajectory> current = solve(graph);
    out.iterations = 1;
    std::set<std::vector<std::vector<int>>> seen{canonical(current, dets)};

    for (int iter = 2; iter <= sp.max_iterations; ++iter) {
        const std::vector<DetState> st = estimate_states(dets, current, cp, sp);
        const track::TrackingGraph g2 =
            track::build(dets, cp, [&](int from, int to) {
                return social_link_cost(dets, st, by_frame, from, to, cp, sp);
            });
        std::vector<Trajectory> next = solve(g2);
        out.iterations = iter;
        const auto enc = canonical(next, dets);
        if (enc == canonical(current, dets)) {
            current = std::move(next);
            out.converged = true;
            break;
        }
        current = std::move(next);
        if (!seen.insert(enc).second) break;  // cycling between solutions
    }
    if (sp.max_iterations == 1) out.converged = true;

    for (const Trajectory& t : current) {
        TrackedTrajectory tt;
        tt.id = t.id;
        tt.cost = t.cost;
        for (int k : t.det_indices) tt.detections.push_back(dets[k]);
        out.trajectories.push_back(std::move(tt));
    }
    return out;
}

}  // namespace

EmResult em_track(const std::vector<Detection>& dets, const track::CostParams& cost_params,
                  const SocialParams& social_params) {
    social_params.validate();
    EmResult result;
    if (dets.empty()) return result;

    int f_lo = dets[0].frame, f_hi = dets[0].frame;
    for (const Detection& d : dets) {
        f_lo = std::min(f_lo, d.frame);
        f_hi = std::max(f_hi, d.frame);
    }
    const int span = f_hi - f_lo + 1;
    const int stride = social_params.batch_frames - social_params.batch_overlap;

    std::vector<std::pair<int, int>> windows;  // [first, last] frames inclusive
    if (span <= social_params.batch_frames) {
        windows.push_back({f_lo, f_hi});
    } else {
        for (int start = f_lo; start < f_hi; start += stride) {
            windows.push_back({start, std::min(start + social_params.batch_frames - 1, f_hi)});
            if (windows.back().second == f_hi) break;
        }
    }
    result.batches = static_cast<int>(windows.size());

    std::vector<TrackedTrajectory> merged;
    for (const auto& [first, last] : windows) {
        std::vector<Detection> batch;
        for (const Detection& d : dets)
            if (d.frame >= first && d.frame <= last) batch.push_back(d);
        BatchResult br = run_batch(batch, cost_params, social_params);
        result.iterations_used = std::max(result.iterations_used, br.iterations);
        result.converged = result.converged && br.converged;

        for (TrackedTrajectory& nt : br.trajectories) {
            // Stitch with existing trajectories sharing a detection id.
            std::set<int> ids;
            for (const Detection& d : nt.detections) ids.insert(d.id);
            int best = -1;
            double best_cost = 0.0;
            int best_shared = 0;
            for (std::size_t g = 0; g < merged.size(); ++g) {
                int shared = 0;
                for (const Detection& d : merged[g].detections)
                    if (ids.count(d.id)) ++shared;
                if (shared == 0) continue;
                const double combined = merged[g].cost + nt.cost;
                if (best < 0 || combined < best_cost ||
                    (combined == best_cost && shared > best_shared)) {
                    best = static_cast<int>(g);
                    best_cost = combined;
                    best_shared = shared;
                }
            }
            if (best < 0) {
                merged.push_back(std::move(nt));
                continue;
            }
            TrackedTrajectory& g = merged[best];
            std::set<int> have;
            for (const Detection& d : g.detections) have.insert(d.id);
            for (const Detection& d : nt.detections)
                if (!have.count(d.id)) g.detections.push_back(d);
            std::sort(g.detections.begin(), g.detections.end(),
                      [](const Detection& a, const Detection& b) {
                          return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
                      });
            g.cost += nt.cost;
        }
    }

    std::sort(merged.begin(), merged.end(), [](const TrackedTrajectory& a, const TrackedTrajectory& b) {
        const int fa = a.detections.front().frame, fb = b.detections.front().frame;
        if (fa != fb) return fa < fb;
        return a.detections.front().id < b.detections.front().id;
    });
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i].id = static_cast<int>(i) + 1;
    result.trajectories = std::move(merged);
    return result;
}

}  // namespace trackflow::social
