#include <doctest.h>

#include <cmath>

#include "trackflow/metrics.hpp"

using namespace trackflow;
using namespace trackflow::metrics;
using track::Detection;
using track::TrackedTrajectory;

namespace {

Detection det(int frame, double x, double y, int id = 0) {
    Detection d;
    d.frame = frame;
    d.pos = {x, y, 0};
    d.id = id;
    return d;
}

Detection boxed(int frame, double left, double top, double w, double h) {
    Detection d = det(frame, left, top);
    d.bbox = BBox{left, top, w, h};
    return d;
}

TrackedTrajectory traj(int id, std::vector<Detection> dets) {
    TrackedTrajectory t;
    t.id = id;
    t.detections = std::move(dets);
    return t;
}

std::vector<TrackedTrajectory> two_walkers(int frames) {
    std::vector<TrackedTrajectory> ts;
    std::vector<Detection> a, b;
    for (int f = 0; f < frames; ++f) {
        a.push_back(det(f, 0.4 * f, 0.0, f * 2));
        b.push_back(det(f, 0.4 * f, 5.0, f * 2 + 1));
    }
    ts.push_back(traj(1, a));
    ts.push_back(traj(2, b));
    return ts;
}

}  // namespace

TEST_CASE("frame matching: identical, disjoint, and threshold-inclusive sets") {
    const ClearConfig cfg;
    const std::vector<Detection> gt = {det(0, 1, 1), det(0, 5, 5)};
    SUBCASE("identical sets match completely") {
        const FrameMatch m = match_frame(gt, gt, cfg);
        CHECK(m.pairs.size() == 2);
        for (double ov : m.overlap) CHECK(ov == doctest::Approx(1.0));
    }
    SUBCASE("far-apart sets match nothing") {
        const std::vector<Detection> hyp = {det(0, 20, 20), det(0, 30, 30)};
        CHECK(match_frame(gt, hyp, cfg).pairs.empty());
    }
    SUBCASE("the one-metre gate is inclusive") {
        const std::vector<Detection> hyp = {det(0, 2.0, 1.0)};
        const FrameMatch m = match_frame(gt, hyp, cfg);
        REQUIRE(m.pairs.size() == 1);
        CHECK(m.overlap[0] == doctest::Approx(0.0));  // 1 - dist/gate at the edge
    }
    SUBCASE("IoU exactly at the 25% threshold still matches") {
        // two unit squares overlapping on 2/5 of their union: pick shift so
        // IoU = 0.25: inter = 0.4, union = 1.6 with w=1,h=1, shift x by 0.6:
        // inter = 0.4*1 = 0.4, union = 2 - 0.4 = 1.6, IoU = 0.25
        const std::vector<Detection> g = {boxed(0, 0, 0, 1, 1)};
        const std::vector<Detection> h = {boxed(0, 0.6, 0, 1, 1)};
        const FrameMatch m = match_frame(g, h, cfg);
        REQUIRE(m.pairs.size() == 1);
        CHECK(m.overlap[0] == doctest::Approx(0.25));
        CHECK(!m.distance_mode);
    }
    SUBCASE("greedy-optimal assignment maximises matches first") {
        // one hyp could serve either gt; the pairing must still cover one
        const std::vector<Detection> h2 = {det(0, 1.4, 1.0), det(0, 4.9, 5.0)};
        const FrameMatch m = match_frame(gt, h2, cfg);
        CHECK(m.pairs.size() == 2);
    }
}

TEST_CASE("perfect tracking scores ones across the board") {
    const auto gt = two_walkers(10);
    const ClearReport rep = evaluate(gt, gt);
    CHECK(rep.da == doctest::Approx(1.0));
    CHECK(rep.ta == doctest::Approx(1.0));
    CHECK(rep.dp == doctest::Approx(1.0));
    CHECK(rep.tp == doctest::Approx(1.0));
    CHECK(rep.total_switches == 0);
    CHECK(rep.distance_mode);
}

TEST_CASE("a single miss costs exactly 1/NG") {
    const auto gt = two_walkers(10);
    auto hyp = gt;
    hyp[0].detections.erase(hyp[0].detections.begin() + 4);
    const ClearReport rep = evaluate(gt, hyp);
    CHECK(rep.total_misses == 1);
    CHECK(rep.total_false_alarms == 0);
    CHECK(rep.da == doctest::Approx(1.0 - 1.0 / 20.0).epsilon(1e-12));
}

TEST_CASE("one identity switch lands in TA with the log10 weight") {
    const auto gt = two_walkers(10);
    auto hyp = gt;
    // swap the two hypothesis tracks from frame 5 on
    for (int f = 5; f < 10; ++f) std::swap(hyp[0].detections[f], hyp[1].detections[f]);
    const ClearReport rep = evaluate(gt, hyp);
    CHECK(rep.total_misses == 0);
    CHECK(rep.total_false_alarms == 0);
    CHECK(rep.total_switches == 2);  // both identities change partners at f=5
    CHECK(rep.da == doctest::Approx(1.0));
    // one frame carries two switches: penalty log10(1+2), NG = 20
    CHECK(rep.ta == doctest::Approx(1.0 - std::log10(3.0) / 20.0).epsilon(1e-12));

    // single-switch fixture: one gt walker, hypothesis splits identity at 5
    std::vector<TrackedTrajectory> g1 = {two_walkers(10)[0]};
    std::vector<Detection> first, second;
    for (int f = 0; f < 5; ++f) first.push_back(g1[0].detections[f]);
    for (int f = 5; f < 10; ++f) second.push_back(g1[0].detections[f]);
    const std::vector<TrackedTrajectory> h1 = {traj(1, first), traj(2, second)};
    const ClearReport r1 = evaluate(g1, h1);
    CHECK(r1.total_switches == 1);
    CHECK(r1.da == doctest::Approx(1.0));
    CHECK(r1.ta == doctest::Approx(1.0 - std::log10(2.0) / 10.0).epsilon(1e-12));
}

TEST_CASE("switch bookkeeping never resets across gaps") {
    // gt walker observed, lost for a while, observed again under a new id
    std::vector<TrackedTrajectory> gt = {
        traj(1, {det(0, 0, 0), det(1, 0.3, 0), det(7, 2.1, 0), det(8, 2.4, 0)})};
    std::vector<TrackedTrajectory> hyp = {
        traj(1, {det(0, 0, 0), det(1, 0.3, 0)}),
        traj(2, {det(7, 2.1, 0), det(8, 2.4, 0)})};
    const ClearReport rep = evaluate(gt, hyp);
    CHECK(rep.total_switches == 1);  // counted despite the six-frame gap
}

TEST_CASE("uniform relabeling of hypothesis ids changes nothing") {
    const auto gt = two_walkers(8);
    auto hyp = gt;
    hyp[0].id = 77;
    hyp[1].id = 12;
    const ClearReport a = evaluate(gt, gt);
    const ClearReport b = evaluate(gt, hyp);
    CHECK(a.da == b.da);
    CHECK(a.ta == b.ta);
    CHECK(a.dp == b.dp);
    CHECK(a.tp == b.tp);
    CHECK(a.total_switches == b.total_switches);
}

TEST_CASE("a pure false-alarm track hurts accuracy but not precision") {
    const auto gt = two_walkers(8);
    auto hyp = gt;
    std::vector<Detection> noise;
    for (int f = 0; f < 8; ++f) noise.push_back(det(f, 15.0, 15.0, 100 + f));
    hyp.push_back(traj(3, noise));
    const ClearReport clean = evaluate(gt, gt);
    const ClearReport rep = evaluate(gt, hyp);
    CHECK(rep.da < clean.da);
    CHECK(rep.ta < clean.ta);
    CHECK(rep.dp == doctest::Approx(clean.dp));
    CHECK(rep.tp == doctest::Approx(clean.tp));
    CHECK(rep.total_false_alarms == 8);
}

TEST_CASE("precision scores stay within [0,1] in both modes") {
    const auto gt = two_walkers(6);
    auto hyp = gt;
    for (auto& t : hyp)
        for (auto& d : t.detections) d.pos.x += 0.35;  // within the gate
    const ClearReport rep = evaluate(gt, hyp);
    CHECK(rep.dp > 0.0);
    CHECK(rep.dp < 1.0);
    CHECK(rep.tp > 0.0);
    CHECK(rep.tp < 1.0);
    CHECK(rep.da == doctest::Approx(1.0));
    CHECK(rep.dp == doctest::Approx(1.0 - 0.35).epsilon(1e-9));
}

TEST_CASE("bounding boxes switch the evaluation into IoU mode") {
    std::vector<TrackedTrajectory> gt(1), hyp(1);
    gt[0].id = hyp[0].id = 1;
    for (int f = 0; f < 6; ++f) {
        gt[0].detections.push_back(boxed(f, 10.0 * f, 5.0, 4.0, 8.0));
        hyp[0].detections.push_back(boxed(f, 10.0 * f + 0.5, 5.0, 4.0, 8.0));
    }
    const ClearReport rep = evaluate(gt, hyp);
    CHECK(!rep.distance_mode);
    CHECK(rep.da == doctest::Approx(1.0));
    // IoU of two 4x8 boxes shifted by 0.5: inter 3.5*8, union 2*32 - 28
    const double expected = 28.0 / 36.0;
    CHECK(rep.dp == doctest::Approx(expected).epsilon(1e-9));
    CHECK(rep.tp == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("reports serialize to text and csv") {
    const auto gt = two_walkers(4);
    const ClearReport rep = evaluate(gt, gt);
    const std::string text = rep.to_text();
    CHECK(text.find("DA") != std::string::npos);
    const std::string csv = rep.to_csv();
    CHECK(csv.find("metric,value") == 0);
    CHECK(csv.find("TA,1") != std::string::npos);
}
