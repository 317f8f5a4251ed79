#include "trackflow/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace trackflow::sim {

namespace {

using track::Detection;
using track::TrackedTrajectory;

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
    if (spec.walkers <= 0 || spec.frames <= 0)
        throw std::invalid_argument("scenario: walkers and frames must be positive");
    int grouped = 0;
    for (int s : spec.group_sizes) {
        if (s < 2) throw std::invalid_argument("scenario: groups need at least 2 members");
        grouped += s;
    }
    if (grouped > spec.walkers)
        throw std::invalid_argument("scenario: group sizes exceed the walker count");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> upos(spec.scene_size * 0.15, spec.scene_size * 0.85);
    std::uniform_real_distribution<double> uang(0.0, 2.0 * M_PI);
    std::normal_distribution<double> jitter(0.0, spec.heading_sigma);

    Scenario out;
    out.spec = spec;
    out.walker_group.assign(spec.walkers, 0);
    out.ground_truth.resize(spec.walkers);
    for (int i = 0; i < spec.walkers; ++i) out.ground_truth[i].id = i + 1;

    const double dt = 1.0 / spec.fps;
    const double margin = 1.0;

    // A group shares one base path; members ride fixed lateral offsets on the
    // rotating normal, so pairwise distances stay at the configured spacing.
    struct Base {
        Vec3 pos;
        double heading;
        std::vector<int> members;      // walker indices
        std::vector<double> laterals;  // per member
    };
    std::vector<Base> bases;
    int w = 0;
    int label = 1;
    for (int gs : spec.group_sizes) {
        Base base;
        base.pos = {upos(rng), upos(rng), 0.0};
        base.heading = uang(rng);
        for (int k = 0; k < gs; ++k, ++w) {
            base.members.push_back(w);
            base.laterals.push_back((k - (gs - 1) / 2.0) * spec.group_spacing);
            out.walker_group[w] = label;
        }
        bases.push_back(std::move(base));
        ++label;
    }
    for (; w < spec.walkers; ++w) {
        Base base;
        base.pos = {upos(rng), upos(rng), 0.0};
        base.heading = uang(rng);
        base.members.push_back(w);
        base.laterals.push_back(0.0);
        bases.push_back(std::move(base));
    }

    for (int f = 0; f < spec.frames; ++f) {
        // emit positions walker-major so ids follow (frame, walker)
        std::vector<Vec3> frame_pos(spec.walkers);
        for (const Base& base : bases) {
            const double nx = -std::sin(base.heading), ny = std::cos(base.heading);
            for (std::size_t k = 0; k < base.members.size(); ++k)
                frame_pos[base.members[k]] = base.pos + Vec3{nx, ny, 0.0} * base.laterals[k];
        }
        for (int i = 0; i < spec.walkers; ++i) {
            Detection d;
            d.frame = f;
            d.id = f * spec.walkers + i;
            d.pos = frame_pos[i];
            out.ground_truth[i].detections.push_back(d);
        }
        for (Base& base : bases) {
            base.heading += jitter(rng);
            Vec3 next = base.pos + Vec3{std::cos(base.heading), std::sin(base.heading), 0.0} *
                                       (spec.walker_speed * dt);
            if (next.x < margin || next.x > spec.scene_size - margin) {
                base.heading = M_PI - base.heading;
                next.x = std::clamp(next.x, margin, spec.scene_size - margin);
            }
            if (next.y < margin || next.y > spec.scene_size - margin) {
                base.heading = -base.heading;
                next.y = std::clamp(next.y, margin, spec.scene_size - margin);
            }
            base.pos = next;
        }
    }
    return out;
}

std::vector<Detection> perturb(const Scenario& scenario, const PerturbationSpec& spec) {
    if (spec.missing < 0.0 || spec.missing > 1.0)
        throw std::invalid_argument("perturb: missing fraction out of [0,1]");
    if (spec.outliers < 0.0) throw std::invalid_argument("perturb: negative outlier fraction");
    if (spec.noise_var < 0.0) throw std::invalid_argument("perturb: negative noise variance");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double scene = scenario.spec.scene_size;
    const double sigma = std::sqrt(spec.noise_var * scene);
    std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);

    // Keep all ground-truth detections in (frame, walker) order so the draw
    // sequence is stable under any parameter combination.
    std::vector<const Detection*> ordered;
    for (int f = 0; f < scenario.spec.frames; ++f)
        for (const auto& t : scenario.ground_truth) {
            for (const Detection& d : t.detections)
                if (d.frame == f) ordered.push_back(&d);
        }

    std::vector<Detection> out;
    int max_id = 0;
    for (const Detection* src : ordered) {
        max_id = std::max(max_id, src->id);
        if (spec.missing > 0.0 && coin(rng) < spec.missing) continue;
        Detection d = *src;
        d.confidence = spec.confidence;
        if (sigma > 0.0) {
            d.pos.x += noise(rng);
            d.pos.y += noise(rng);
        }
        out.push_back(d);
    }

    const int n_outliers =
        static_cast<int>(std::lround(spec.outliers * static_cast<double>(ordered.size())));
    std::uniform_real_distribution<double> upos(0.0, scene);
    std::uniform_int_distribution<int> uframe(0, scenario.spec.frames - 1);
    for (int k = 0; k < n_outliers; ++k) {
        Detection d;
        d.frame = uframe(rng);
        d.id = ++max_id;
        d.pos = {upos(rng), upos(rng), 0.0};
        d.confidence = spec.confidence;
        out.push_back(d);
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
    });
    return out;
}

}  // namespace trackflow::sim
