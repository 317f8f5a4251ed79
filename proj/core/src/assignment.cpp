#include "trackflow/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace trackflow::assign {

namespace {

constexpr double kForbidden = 1e9;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return {};
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("hungarian: matrix must be square");
        for (double v : row)
            if (!std::isfinite(v)) throw std::invalid_argument("hungarian: entries must be finite");
    }

    // Potential-based shortest augmenting path, 1-indexed internally.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> result(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) result[p[j] - 1] = j - 1;
    return result;
}

double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<int>& assignment) {
    double s = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i) s += cost[i][assignment[i]];
    return s;
}

double border_distance(const Vec3& p, const VolumeBounds& b) {
    double d = kInf;
    if (b.xmax > b.xmin) d = std::min({d, p.x - b.xmin, b.xmax - p.x});
    if (b.ymax > b.ymin) d = std::min({d, p.y - b.ymin, b.ymax - p.y});
    if (b.zmax > b.zmin) d = std::min(d, b.zmax - p.z);  // lower z face excluded
    return std::max(0.0, d);
}

AugmentedCostMatrix augment_in_out(const std::vector<Particle>& frame_f,
                                   const std::vector<Particle>& frame_f1,
                                   const VolumeBounds& bounds, double v_thresh) {
    AugmentedCostMatrix out;
    out.m = static_cast<int>(frame_f.size());
    out.n = static_cast<int>(frame_f1.size());
    const int size = out.m + out.n;
    out.cost.assign(size, std::vector<double>(size, kForbidden));
    for (int i = 0; i < out.m; ++i)
        for (int j = 0; j < out.n; ++j) {
            const double d = distance(frame_f[i].pos, frame_f1[j].pos);
            out.cost[i][j] = d <= v_thresh ? d : kForbidden;
        }
    for (int i = 0; i < out.m; ++i)
        out.cost[i][out.n + i] = border_distance(frame_f[i].pos, bounds);
    for (int j = 0; j < out.n; ++j)
        out.cost[out.m + j][j] = border_distance(frame_f1[j].pos, bounds);
    for (int j = 0; j < out.m; ++j)
        for (int i = 0; i < out.n; ++i) out.cost[out.m + i][out.n + j] = 0.0;
    return out;
}

std::vector<std::pair<int, int>> match_in_out(const std::vector<Particle>& frame_f,
                                              const std::vector<Particle>& frame_f1,
                                              const VolumeBounds& bounds, double v_thresh) {
    if (frame_f.empty() || frame_f1.empty()) return {};
    const AugmentedCostMatrix aug = augment_in_out(frame_f, frame_f1, bounds, v_thresh);
    const std::vector<int> assignment = hungarian(aug.cost);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < aug.m; ++i) {
        const int j = assignment[i];
        if (j < aug.n && aug.cost[i][j] < kForbidden) pairs.emplace_back(i, j);
    }
    return pairs;
}

namespace {

// id -> id matching between two frame slots, empty-safe.
std::map<int, int> level_match(const std::vector<Particle>& a, const std::vector<Particle>& b,
                               const MlhParams& params, int gap) {
    std::map<int, int> out;
    for (const auto& [i, j] : match_in_out(a, b, params.bounds, params.v_thresh * gap))
        out[a[i].id] = b[j].id;
    return out;
}

const Particle* find_particle(const std::vector<Particle>& v, int id) {
    for (const Particle& p : v)
        if (p.id == id) return &p;
    return nullptr;
}

}  // namespace

ParticleTable multi_level_match(const std::array<std::vector<Particle>, 5>& frames,
                                int center_frame, const MlhParams& params) {
    ParticleTable table;
    table.center_frame = center_frame;

    // Level 1: i <-> i+-1, level 2: i <-> i+-2.
    const auto l1a = level_match(frames[2], frames[3], params, 1);
    const auto l1b = level_match(frames[2], frames[1], params, 1);
    const auto l2a = level_match(frames[2], frames[4], params, 2);
    const auto l2b = level_match(frames[2], frames[0], params, 2);
    // Level 3: i-1 <-> i+1; level 4: i+-1 <-> i-+2; level 5: i+-1 <-> i+-2.
    const auto l3 = level_match(frames[1], frames[3], params, 2);
    const auto l4a = level_match(frames[3], frames[0], params, 3);
    const auto l4b = level_match(frames[1], frames[4], params, 3);
    const auto l5a = level_match(frames[3], frames[4], params, 1);
    const auto l5b = level_match(frames[1], frames[0], params, 1);

    std::array<std::set<int>, 5> used;
    auto place = [&](std::array<ParticleTable::Cell, 5>& row, int col, int id) {
        if (used[col].count(id)) return false;
        const Particle* p = find_particle(frames[col], id);
        if (!p) return false;
        row[col] = {true, id, p->pos, false};
        used[col].insert(id);
        return true;
    };
    auto follow = [&](const std::map<int, int>& match, std::array<ParticleTable::Cell, 5>& row,
                      int from_col, int to_col) {
        if (!row[from_col].present) return;
        auto it = match.find(row[from_col].id);
        if (it != match.end()) place(row, to_col, it->second);
    };

    // Rows anchored at the frame of study.
    for (const Particle& p : frames[2]) {
        std::array<ParticleTable::Cell, 5> row;
        place(row, 2, p.id);
        follow(l1a, row, 2, 3);
        follow(l1b, row, 2, 1);
        follow(l2a, row, 2, 4);
        follow(l2b, row, 2, 0);
        table.rows.push_back(row);
    }
    // Rows recovered from i-1 when the particle is absent at i.
    for (const Particle& p : frames[1]) {
        if (used[1].count(p.id)) continue;
        std::array<ParticleTable::Cell, 5> row;
        place(row, 1, p.id);
        follow(l3, row, 1, 3);
        follow(l4b, row, 1, 4);
        follow(l5b, row, 1, 0);
        table.rows.push_back(row);
    }
    // Rows recovered from i+1.
    for (const Particle& p : frames[3]) {
        if (used[3].count(p.id)) continue;
        std::array<ParticleTable::Cell, 5> row;
        place(row, 3, p.id);
        follow(l5a, row, 3, 4);
        follow(l4a, row, 3, 0);
        table.rows.push_back(row);
    }
    // Anything still unplaced becomes an isolated single-cell row.
    for (int col : {0, 4}) {
        for (const Particle& p : frames[col]) {
            if (used[col].count(p.id)) continue;
            std::array<ParticleTable::Cell, 5> row;
            place(row, col, p.id);
            table.rows.push_back(row);
        }
    }
    return table;
}

int add_iteration(ParticleTable& table, int& next_synthetic_id) {
    int added_total = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& row : table.rows) {
            int count = 0, first = -1, last = -1;
            for (int c = 0; c < 5; ++c) {
                if (!row[c].present) continue;
                ++count;
                if (first < 0) first = c;
                last = c;
            }
            if (count < 3) continue;
            for (int c = first + 1; c < last; ++c) {
                if (row[c].present) continue;
                int a = c - 1, b = c + 1;
                while (!row[a].present) --a;
                while (!row[b].present) ++b;
                const double t = static_cast<double>(c - a) / static_cast<double>(b - a);
                row[c] = {true, next_synthetic_id++, row[a].pos + (row[b].pos - row[a].pos) * t,
                          true};
                ++added_total;
                changed = true;
            }
        }
    }
    return added_total;
}

int delete_iteration(ParticleTable& table) {
    int deleted_total = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& row : table.rows) {
            if (!row[2].present) continue;
            int count = 0;
            for (int c = 0; c < 5; ++c)
                if (row[c].present) ++count;
            if (count >= 3) continue;
            // Only particles whose whole neighbourhood is known are removed.
            for (int c = 1; c <= 3; ++c) {
                if (!row[c].present) continue;
                row[c] = {};
                ++deleted_total;
                changed = true;
            }
        }
    }
    std::erase_if(table.rows, [](const auto& row) {
        for (const auto& cell : row)
            if (cell.present) return false;
        return true;
    });
    return deleted_total;
}

namespace {

using track::Detection;
using track::TrackedTrajectory;

std::map<int, std::vector<Particle>> particles_by_frame(const std::vector<Detection>& dets) {
    std::map<int, std::vector<Particle>> by_frame;
    for (const Detection& d : dets) by_frame[d.frame].push_back({d.id, d.pos});
    for (auto& [f, v] : by_frame)
        std::sort(v.begin(), v.end(), [](const Particle& a, const Particle& b) { return a.id < b.id; });
    return by_frame;
}

std::vector<TrackedTrajectory> link_chains(const std::map<int, std::vector<Particle>>& by_frame,
                                           const MlhParams& params) {
    if (by_frame.empty()) return {};
    const int f_lo = by_frame.begin()->first;
    const int f_hi = by_frame.rbegin()->first;

    // next[(frame, id)] = id in frame+1
    std::map<std::pair<int, int>, int> next;
    std::set<std::pair<int, int>> has_prev;
    for (int f = f_lo; f < f_hi; ++f) {
        auto ita = by_frame.find(f);
        auto itb = by_frame.find(f + 1);
        if (ita == by_frame.end() || itb == by_frame.end()) continue;
        for (const auto& [i, j] : match_in_out(ita->second, itb->second, params.bounds,
                                               params.v_thresh)) {
            next[{f, ita->second[i].id}] = itb->second[j].id;
            has_prev.insert({f + 1, itb->second[j].id});
        }
    }

    std::vector<TrackedTrajectory> out;
    for (const auto& [f, particles] : by_frame) {
        for (const Particle& p : particles) {
            if (has_prev.count({f, p.id})) continue;
            TrackedTrajectory t;
            int frame = f;
            int id = p.id;
            while (true) {
                const Particle* cur = find_particle(by_frame.at(frame), id);
                Detection d;
                d.frame = frame;
                d.id = id;
                d.pos = cur->pos;
                t.detections.push_back(d);
                auto it = next.find({frame, id});
                if (it == next.end()) break;
                id = it->second;
                ++frame;
            }
            out.push_back(std::move(t));
        }
    }
    std::sort(out.begin(), out.end(), [](const TrackedTrajectory& a, const TrackedTrajectory& b) {
        if (a.detections.front().frame != b.detections.front().frame)
            return a.detections.front().frame < b.detections.front().frame;
        return a.detections.front().id < b.detections.front().id;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i) + 1;
    return out;
}

}  // namespace

std::vector<TrackedTrajectory> track_mlh(const std::vector<Detection>& dets,
                                         const MlhParams& params) {
    if (dets.empty()) return {};
    std::map<int, std::vector<Particle>> store = particles_by_frame(dets);
    const int f_lo = store.begin()->first;
    const int f_hi = store.rbegin()->first;
    int next_synthetic = 0;
    for (const Detection& d : dets) next_synthetic = std::max(next_synthetic, d.id + 1);

    for (int center = f_lo; center <= f_hi; ++center) {
        std::array<std::vector<Particle>, 5> window;
        for (int c = 0; c < 5; ++c) {
            auto it = store.find(center - 2 + c);
            if (it != store.end()) window[c] = it->second;
        }
        ParticleTable table = multi_level_match(window, center, params);
        add_iteration(table, next_synthetic);
        delete_iteration(table);

        // The add/delete passes only touch columns 1..3; write those frames
        // back. Later windows see (and may revise) these decisions.
        for (int c = 1; c <= 3; ++c) {
            const int frame = center - 2 + c;
            if (frame < f_lo || frame > f_hi) continue;
            std::vector<Particle> fresh;
            for (const auto& row : table.rows)
                if (row[c].present) fresh.push_back({row[c].id, row[c].pos});
            std::sort(fresh.begin(), fresh.end(),
                      [](const Particle& a, const Particle& b) { return a.id < b.id; });
            store[frame] = std::move(fresh);
        }
    }
    return link_chains(store, params);
}

std::vector<TrackedTrajectory> track_hungarian(const std::vector<Detection>& dets,
                                               const MlhParams& params) {
    if (dets.empty()) return {};
    return link_chains(particles_by_frame(dets), params);
}

}  // namespace trackflow::assign
