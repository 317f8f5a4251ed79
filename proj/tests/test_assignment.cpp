#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "trackflow/assignment.hpp"

using namespace trackflow;
using namespace trackflow::assign;

namespace {

const VolumeBounds kBox{0, 10, 0, 10, 0, 5};

std::array<std::vector<Particle>, 5> window_from(
    const std::vector<std::vector<Particle>>& frames) {
    std::array<std::vector<Particle>, 5> w;
    for (std::size_t i = 0; i < frames.size() && i < 5; ++i) w[i] = frames[i];
    return w;
}

}  // namespace

TEST_CASE("hungarian basics") {
    CHECK(hungarian({{3.0}}) == std::vector<int>{0});
    // identity-favouring diagonal
    const std::vector<std::vector<double>> diag = {
        {0, 9, 9}, {9, 0, 9}, {9, 9, 0}};
    CHECK(hungarian(diag) == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(hungarian({{1, 2}}), std::invalid_argument);
}

TEST_CASE("hungarian equals brute force on random matrices") {
    std::mt19937_64 rng(8080);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 7);
        std::vector<std::vector<double>> cost(n, std::vector<double>(n));
        for (auto& row : cost)
            for (double& v : row) v = std::uniform_real_distribution<double>(0, 10)(rng);
        const std::vector<int> a = hungarian(cost);
        // a permutation
        std::set<int> cols(a.begin(), a.end());
        CHECK(cols.size() == static_cast<std::size_t>(n));
        CHECK(assignment_cost(cost, a) ==
              doctest::Approx(oracles::brute_force_assignment(cost)).epsilon(1e-9));
        CHECK(hungarian(cost) == a);  // deterministic
    }
}

TEST_CASE("border distance skips the lower z face and degenerate axes") {
    CHECK(border_distance({5, 5, 2.5}, kBox) == doctest::Approx(2.5));  // to z top
    CHECK(border_distance({1, 5, 0.1}, kBox) == doctest::Approx(1.0));  // to x=0
    // at the z floor the distance is not zero: the bottom face is excluded
    CHECK(border_distance({5, 5, 0}, kBox) == doctest::Approx(5.0));
    const VolumeBounds flat{0, 10, 0, 10, 0, 0};
    CHECK(border_distance({4, 5, 0}, flat) == doctest::Approx(4.0));
}

TEST_CASE("the augmented matrix stays square and forbids fast matches") {
    const std::vector<Particle> f0 = {{0, {2, 5, 1}}, {1, {8, 5, 1}}};
    const std::vector<Particle> f1 = {{2, {2.4, 5, 1}}, {3, {8.4, 5, 1}}, {4, {5, 5, 1}}};
    const AugmentedCostMatrix aug = augment_in_out(f0, f1, kBox, 1.0);
    CHECK(aug.cost.size() == 5);  // M + N
    for (const auto& row : aug.cost) CHECK(row.size() == 5);
    // particle-particle entries beyond the threshold are forbidden
    CHECK(aug.cost[0][1] > 1e8);  // 2 -> 8.4 is far
    CHECK(aug.cost[0][0] == doctest::Approx(0.4));
    // own IN/OUT diagonal carries the border distance
    CHECK(aug.cost[0][3] == doctest::Approx(2.0));
    CHECK(aug.cost[1][4] == doctest::Approx(2.0));
    CHECK(aug.cost[2][0] == doctest::Approx(2.4));
    // corner block is zero
    CHECK(aug.cost[2][3] == 0.0);
    CHECK(aug.cost[4][4] == 0.0);

    // matches never exceed the threshold
    const auto pairs = match_in_out(f0, f1, kBox, 1.0);
    for (const auto& [i, j] : pairs)
        CHECK(distance(f0[i].pos, f1[j].pos) <= 1.0 + 1e-12);
}

TEST_CASE("a leaving and an entering particle both take IN/OUT states") {
    // three walkers continue; one leaves near the border while a new one
    // enters far from every old particle
    std::vector<Particle> f0, f1;
    for (int i = 0; i < 3; ++i) {
        f0.push_back({i, {3.0 + i, 5, 2}});
        f1.push_back({10 + i, {3.2 + i, 5, 2}});
    }
    f0.push_back({3, {9.7, 5, 2}});   // about to exit through x = 10
    f1.push_back({13, {0.3, 9, 2}});  // fresh entry near the far corner
    const auto pairs = match_in_out(f0, f1, kBox, 1.0);
    REQUIRE(pairs.size() == 3);
    for (const auto& [i, j] : pairs) {
        CHECK(i < 3);
        CHECK(f1[j].id == f0[i].id + 10);
    }
}

TEST_CASE("multi-level matching fills rows across the window") {
    MlhParams params;
    params.bounds = kBox;
    params.v_thresh = 1.0;
    SUBCASE("a particle present everywhere yields one full row") {
        std::vector<std::vector<Particle>> frames(5);
        for (int f = 0; f < 5; ++f) frames[f] = {{f, {2.0 + 0.5 * f, 5, 2}}};
        const ParticleTable t = multi_level_match(window_from(frames), 2, params);
        REQUIRE(t.rows.size() == 1);
        for (int c = 0; c < 5; ++c) CHECK(t.rows[0][c].present);
    }
    SUBCASE("a gap at the frame of study is recovered through level 3") {
        std::vector<std::vector<Particle>> frames(5);
        for (int f = 0; f < 5; ++f) {
            if (f == 2) continue;
            frames[f] = {{f, {2.0 + 0.5 * f, 5, 2}}};
        }
        const ParticleTable t = multi_level_match(window_from(frames), 2, params);
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0][0].present);
        CHECK(t.rows[0][1].present);
        CHECK(!t.rows[0][2].present);
        CHECK(t.rows[0][3].present);
        CHECK(t.rows[0][4].present);
    }
    SUBCASE("pure noise stays an isolated single-cell row") {
        std::vector<std::vector<Particle>> frames(5);
        for (int f = 0; f < 5; ++f) frames[f] = {{f, {2.0 + 0.5 * f, 5, 2}}};
        frames[4].push_back({99, {9, 9, 4}});
        const ParticleTable t = multi_level_match(window_from(frames), 2, params);
        REQUIRE(t.rows.size() == 2);
        int cells = 0;
        for (int c = 0; c < 5; ++c)
            if (t.rows[1][c].present) ++cells;
        CHECK(cells == 1);
        CHECK(t.rows[1][4].id == 99);
    }
}

TEST_CASE("adding fills interior gaps only, with interpolated positions") {
    ParticleTable t;
    t.center_frame = 2;
    std::array<ParticleTable::Cell, 5> row{};
    row[0] = {true, 1, {0, 0, 0}, false};
    row[2] = {true, 2, {2, 0, 0}, false};
    row[3] = {true, 3, {3, 0, 0}, false};
    t.rows.push_back(row);
    int next_id = 100;
    const int added = add_iteration(t, next_id);
    CHECK(added == 1);
    CHECK(t.rows[0][1].present);
    CHECK(t.rows[0][1].synthetic);
    CHECK(t.rows[0][1].pos.x == doctest::Approx(1.0));  // halfway 0 -> 2
    CHECK(!t.rows[0][4].present);  // trailing gap untouched

    // a two-particle row is never extended
    ParticleTable t2;
    std::array<ParticleTable::Cell, 5> row2{};
    row2[1] = {true, 1, {0, 0, 0}, false};
    row2[3] = {true, 2, {2, 0, 0}, false};
    t2.rows.push_back(row2);
    CHECK(add_iteration(t2, next_id) == 0);

    // full rows stay untouched
    ParticleTable t3;
    std::array<ParticleTable::Cell, 5> row3{};
    for (int c = 0; c < 5; ++c) row3[c] = {true, c, {double(c), 0, 0}, false};
    t3.rows.push_back(row3);
    CHECK(add_iteration(t3, next_id) == 0);
}

TEST_CASE("deleting removes central outliers and nothing else") {
    auto cell = [](int id, double x) { return ParticleTable::Cell{true, id, {x, 0, 0}, false}; };
    SUBCASE("a single detection at the frame of study is noise") {
        ParticleTable t;
        std::array<ParticleTable::Cell, 5> row{};
        row[2] = cell(7, 1.0);
        t.rows.push_back(row);
        CHECK(delete_iteration(t) == 1);
        CHECK(t.rows.empty());
    }
    SUBCASE("a two-particle row not present at the study frame is kept") {
        ParticleTable t;
        std::array<ParticleTable::Cell, 5> row{};
        row[0] = cell(1, 0.0);
        row[1] = cell(2, 0.5);
        t.rows.push_back(row);
        CHECK(delete_iteration(t) == 0);
        CHECK(t.rows.size() == 1);
    }
    SUBCASE("four-particle rows are never touched") {
        ParticleTable t;
        std::array<ParticleTable::Cell, 5> row{};
        for (int c = 0; c < 4; ++c) row[c] = cell(c, 0.5 * c);
        t.rows.push_back(row);
        CHECK(delete_iteration(t) == 0);
    }
    SUBCASE("outer columns survive even when the centre is deleted") {
        ParticleTable t;
        std::array<ParticleTable::Cell, 5> row{};
        row[0] = cell(1, 0.0);
        row[2] = cell(2, 1.0);
        t.rows.push_back(row);
        CHECK(delete_iteration(t) == 1);  // only the centre cell goes
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0][0].present);
    }
}

TEST_CASE("full tracker recovers clean walkers and interpolates a gap") {
    MlhParams params;
    params.bounds = kBox;
    params.v_thresh = 1.0;

    std::vector<track::Detection> dets;
    for (int f = 0; f < 10; ++f)
        for (int w = 0; w < 2; ++w) {
            if (w == 0 && f == 5) continue;  // one missing detection
            track::Detection d;
            d.frame = f;
            d.id = f * 2 + w;
            d.pos = {1.0 + 0.5 * f, 3.0 + 4.0 * w, 2.0};
            dets.push_back(d);
        }
    const auto trajectories = track_mlh(dets, params);
    REQUIRE(trajectories.size() == 2);
    for (const auto& t : trajectories) CHECK(t.detections.size() == 10);  // gap filled

    CHECK(track_mlh({}, params).empty());
    CHECK(track_hungarian({}, params).empty());

    // no particle is shared between trajectories
    std::set<std::pair<int, int>> seen;
    for (const auto& t : trajectories)
        for (const auto& d : t.detections) CHECK(seen.insert({d.frame, d.id}).second);
}

TEST_CASE("plain frame-to-frame linking splits at every gap") {
    MlhParams params;
    params.bounds = kBox;
    params.v_thresh = 1.0;
    std::vector<track::Detection> dets;
    for (int f = 0; f < 10; ++f) {
        if (f == 5) continue;
        track::Detection d;
        d.frame = f;
        d.id = f;
        d.pos = {1.0 + 0.5 * f, 5.0, 2.0};
        dets.push_back(d);
    }
    const auto sh = track_hungarian(dets, params);
    CHECK(sh.size() == 2);  // the gap cuts the chain
    const auto mlh = track_mlh(dets, params);
    CHECK(mlh.size() == 1);  // the window recovers it
}
