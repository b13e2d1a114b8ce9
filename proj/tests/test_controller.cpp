#include <doctest.h>

#include <cmath>
#include <set>

#include "leadsim/controller.hpp"

using namespace leadsim;

namespace {
constexpr Scalar kDt = 0.04;
}

TEST_SUITE("carefulness-law") {

TEST_CASE("integrator steps by rate times the score offset") {
    const ControllerParams p;
    // Saturated avoidance pushes up by 0.075 * 0.5 per step.
    CHECK(update_carefulness(0.5, 1.0, p, UpdateLaw::Integrator, kDt) ==
          doctest::Approx(0.5375));
    // Balanced score (at the baseline) holds.
    CHECK(update_carefulness(0.5, 0.5, p, UpdateLaw::Integrator, kDt) == doctest::Approx(0.5));
    // Calm fish pulls down.
    CHECK(update_carefulness(0.5, 0.0, p, UpdateLaw::Integrator, kDt) ==
          doctest::Approx(0.4625));
}

TEST_CASE("inverted drive sign flips the direction") {
    const ControllerParams p;
    CHECK(update_carefulness(0.5, 1.0, p, UpdateLaw::Integrator, kDt, -1.0) ==
          doctest::Approx(0.4625));
    CHECK(update_carefulness(0.5, 0.0, p, UpdateLaw::Integrator, kDt, -1.0) ==
          doctest::Approx(0.5375));
}

TEST_CASE("integrator saturates from midpoint to full in 14 steps") {
    const ControllerParams p;
    Scalar a = p.carefulness_init;
    int steps = 0;
    while (a < 1.0 && steps < 100) {
        a = update_carefulness(a, 1.0, p, UpdateLaw::Integrator, kDt);
        ++steps;
    }
    CHECK(steps == 14);
    CHECK(a == doctest::Approx(1.0));
}

TEST_CASE("integrator output is clamped to the unit interval") {
    const ControllerParams p;
    Scalar a = 0.99;
    for (int i = 0; i < 10; ++i) a = update_carefulness(a, 1.0, p, UpdateLaw::Integrator, kDt);
    CHECK(a == doctest::Approx(1.0));
    a = 0.01;
    for (int i = 0; i < 10; ++i) a = update_carefulness(a, 0.0, p, UpdateLaw::Integrator, kDt);
    CHECK(a == doctest::Approx(0.0));
}

TEST_CASE("leaky law bleeds toward a small drive-scaled level") {
    const ControllerParams p;
    CHECK(update_carefulness(0.5, 1.0, p, UpdateLaw::Leaky, kDt) ==
          doctest::Approx(0.925 * 0.5 + 0.075 * 0.5 * kDt));
    // Repeated application settles near drive * dt, far below the integrator.
    Scalar a = 0.5;
    for (int i = 0; i < 2000; ++i) a = update_carefulness(a, 1.0, p, UpdateLaw::Leaky, kDt);
    CHECK(a == doctest::Approx(0.5 * kDt).epsilon(0.01));
}

}  // TEST_SUITE("carefulness-law")

TEST_SUITE("controller-geometry") {

TEST_CASE("side_indicator picks the side the robot is on") {
    const Pose fish(Vec2(0, 0), 0.0);  // facing +x
    CHECK(side_indicator(fish, Vec2(0, 4), -1) == 1);   // robot to the left
    CHECK(side_indicator(fish, Vec2(0, -4), 1) == -1);  // robot to the right
    // Dead ahead is a tie: keep whatever side was used before.
    CHECK(side_indicator(fish, Vec2(4, 0), 1) == 1);
    CHECK(side_indicator(fish, Vec2(4, 0), -1) == -1);
}

TEST_CASE("approach_target at zero carefulness aims just short of the fish") {
    const ControllerParams p;
    const ArenaSpec arena;
    const Pose robot(Vec2(60, 50), 0.0);
    const Pose fish(Vec2(50, 50), 0.0);
    const Vec2 t = approach_target(robot, fish, 0.0, 1, p, arena);
    // Offset point: 6 cm from the fish along fish->robot, i.e. 4 cm short of the robot.
    CHECK(t.x() == doctest::Approx(56.0));
    CHECK(t.y() == doctest::Approx(50.0));
}

TEST_CASE("approach_target at full carefulness swings a quarter turn") {
    const ControllerParams p;
    const ArenaSpec arena;
    const Pose robot(Vec2(60, 50), 0.0);
    const Pose fish(Vec2(50, 50), 0.0);
    const Vec2 left = approach_target(robot, fish, 1.0, 1, p, arena);
    CHECK(left.x() == doctest::Approx(60.0));
    CHECK(left.y() == doctest::Approx(46.0));
    const Vec2 right = approach_target(robot, fish, 1.0, -1, p, arena);
    CHECK(right.x() == doctest::Approx(60.0));
    CHECK(right.y() == doctest::Approx(54.0));
}

TEST_CASE("approach deflection angle is carefulness times a quarter turn") {
    const ControllerParams p;
    const ArenaSpec arena;
    const Pose robot(Vec2(60, 50), 0.0);
    const Pose fish(Vec2(50, 50), 0.0);
    const Scalar a = 0.528;
    const Vec2 direct = approach_target(robot, fish, 0.0, 1, p, arena) - robot.position;
    const Vec2 deflected = approach_target(robot, fish, a, 1, p, arena) - robot.position;
    const Scalar cosang = direct.dot(deflected) / (direct.norm() * deflected.norm());
    const Scalar angle_deg = std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / kPi;
    CHECK(angle_deg == doctest::Approx(47.52).epsilon(1e-6));
    // The swing preserves the distance from the robot to the waypoint.
    CHECK(deflected.norm() == doctest::Approx(direct.norm()));
}

TEST_CASE("approach_target stays inside the arena") {
    const ControllerParams p;
    const ArenaSpec arena;
    const Pose robot(Vec2(2, 2), 0.0);
    const Pose fish(Vec2(6, 2), 0.0);
    // Full swing would leave the arena; the waypoint is clamped to the walls.
    const Vec2 t = approach_target(robot, fish, 1.0, 1, p, arena);
    CHECK(arena.contains(t));
}

TEST_CASE("approach_target rejects coincident robot and fish") {
    const ControllerParams p;
    const ArenaSpec arena;
    const Pose both(Vec2(50, 50), 0.0);
    CHECK_THROWS_AS(approach_target(both, both, 0.5, 1, p, arena), DegenerateGeometry);
}

TEST_CASE("speed_factor covers all phases") {
    const ControllerParams p;
    // Approach speed falls linearly with carefulness from 1.2 to 0.2.
    CHECK(speed_factor(0.0, Phase::Approach, p) == doctest::Approx(1.2));
    CHECK(speed_factor(0.0, Phase::Approach, p) * p.speed_unit == doctest::Approx(30.0));
    CHECK(speed_factor(0.528, Phase::Approach, p) == doctest::Approx(0.672));
    CHECK(speed_factor(0.528, Phase::Approach, p) * p.speed_unit == doctest::Approx(16.8));
    CHECK(speed_factor(1.0, Phase::Approach, p) == doctest::Approx(0.2));
    // Lead speed is a fixed fraction of the unit.
    CHECK(speed_factor(0.3, Phase::Lead, p) == doctest::Approx(0.8717));
    CHECK(speed_factor(0.3, Phase::Lead, p) * p.speed_unit == doctest::Approx(21.7925));
    // Milling crawls at the milling speed.
    CHECK(speed_factor(0.3, Phase::Milling, p) * p.speed_unit == doctest::Approx(8.0));
}

TEST_CASE("lead_next_target bursts toward the next circuit corner") {
    const ControllerParams p;
    const ArenaSpec arena;
    SUBCASE("far from the corner: fixed-length burst along the bearing") {
        const auto [target, idx] = lead_next_target(Vec2(50, 50), 0, p, arena);
        CHECK(idx == 0);
        const Scalar step = 15.0 / std::sqrt(2.0);
        CHECK(target.x() == doctest::Approx(50.0 - step));
        CHECK(target.y() == doctest::Approx(50.0 - step));
        CHECK((target - Vec2(50, 50)).norm() == doctest::Approx(15.0));
    }
    SUBCASE("inside burst range: aim at the corner itself") {
        const auto [target, idx] = lead_next_target(Vec2(20, 20), 0, p, arena);
        CHECK(idx == 0);
        CHECK(target.x() == doctest::Approx(10.0));
        CHECK(target.y() == doctest::Approx(10.0));
    }
    SUBCASE("arrived: advance to the next corner") {
        const auto [target, idx] = lead_next_target(Vec2(12, 12), 0, p, arena);
        CHECK(idx == 1);
        // Next corner (10, 90) is far, so this is a burst toward it.
        CHECK((target - Vec2(12, 12)).norm() == doctest::Approx(15.0));
        CHECK(target.y() > 12.0);
    }
    SUBCASE("the circuit wraps around all four corners") {
        const auto corners = arena.lead_corners();
        const auto [target, idx] = lead_next_target(corners[3], 3, p, arena);
        CHECK(idx == 0);
        (void)target;
    }
}

TEST_CASE("milling_target circles past the start-box door") {
    const ControllerParams p;
    const ArenaSpec arena;
    const Vec2 center(arena.side / 2.0, arena.startbox_side * std::sqrt(3.0) / 2.0 + 15.0);
    const Vec2 at0 = milling_target(0.0, p, arena);
    CHECK(at0.x() == doctest::Approx(center.x() + 10.0));
    CHECK(at0.y() == doctest::Approx(center.y()));
    // Angular rate is speed / radius = 0.8 rad/s; a quarter period later the
    // waypoint is at the top of the circle.
    const Scalar quarter = (kPi / 2.0) / 0.8;
    const Vec2 atq = milling_target(quarter, p, arena);
    CHECK(atq.x() == doctest::Approx(center.x()));
    CHECK(atq.y() == doctest::Approx(center.y() + 10.0));
    // Every waypoint sits on the circle.
    for (Scalar t = 0.0; t < 10.0; t += 0.31)
        CHECK((milling_target(t, p, arena) - center).norm() == doctest::Approx(10.0));
}

}  // TEST_SUITE("controller-geometry")

TEST_SUITE("phase-transitions") {

TEST_CASE("approach enters lead after a sustained comfort dwell") {
    const ControllerParams p;
    ControllerState st;
    st.phase = Phase::Approach;
    for (int i = 0; i < 49; ++i) {
        const auto r = phase_transition(st, 8.0, kDt, p);
        CHECK(r.phase == Phase::Approach);
        CHECK_FALSE(r.entered_lead);
    }
    const auto r = phase_transition(st, 8.0, kDt, p);  // 50th step reaches 2 s
    CHECK(r.phase == Phase::Lead);
    CHECK(r.entered_lead);
    CHECK(st.comfort_timer_s == doctest::Approx(0.0));
    CHECK_FALSE(st.has_lead_target);
}

TEST_CASE("drifting out of the comfort band resets the dwell") {
    const ControllerParams p;
    ControllerState st;
    st.phase = Phase::Approach;
    for (int i = 0; i < 40; ++i) phase_transition(st, 8.0, kDt, p);
    CHECK(st.comfort_timer_s == doctest::Approx(1.6));
    phase_transition(st, 13.0, kDt, p);  // beyond comfort_dist
    CHECK(st.comfort_timer_s == doctest::Approx(0.0));
    CHECK(st.phase == Phase::Approach);
}

TEST_CASE("getting too close pauses the dwell without resetting it") {
    const ControllerParams p;
    ControllerState st;
    st.phase = Phase::Approach;
    for (int i = 0; i < 40; ++i) phase_transition(st, 8.0, kDt, p);
    const Scalar before = st.comfort_timer_s;
    for (int i = 0; i < 20; ++i) phase_transition(st, 4.0, kDt, p);  // inside close_dist
    CHECK(st.comfort_timer_s == doctest::Approx(before));
    CHECK(st.phase == Phase::Approach);
    // Resuming in the band completes the dwell.
    for (int i = 0; i < 10; ++i) phase_transition(st, 8.0, kDt, p);
    CHECK(st.phase == Phase::Lead);
}

TEST_CASE("the dwell boundary is inclusive on both edges") {
    const ControllerParams p;
    ControllerState st;
    st.phase = Phase::Approach;
    for (int i = 0; i < 25; ++i) phase_transition(st, 6.0, kDt, p);   // at close_dist: counts
    for (int i = 0; i < 24; ++i) phase_transition(st, 12.0, kDt, p);  // at comfort_dist: counts
    CHECK(st.phase == Phase::Approach);
    phase_transition(st, 12.0, kDt, p);
    CHECK(st.phase == Phase::Lead);
}

TEST_CASE("lead falls back to approach after sustained separation") {
    const ControllerParams p;
    ControllerState st;
    st.phase = Phase::Lead;
    for (int i = 0; i < 24; ++i) {
        const auto r = phase_transition(st, 30.0, kDt, p);
        CHECK(r.phase == Phase::Lead);
    }
    const auto r = phase_transition(st, 30.0, kDt, p);  // 25th step reaches 1 s
    CHECK(r.phase == Phase::Approach);
    CHECK(r.entered_approach);
    CHECK(st.apart_timer_s == doctest::Approx(0.0));
}

TEST_CASE("a fish that catches up clears the separation timer") {
    const ControllerParams p;
    ControllerState st;
    st.phase = Phase::Lead;
    for (int i = 0; i < 20; ++i) phase_transition(st, 30.0, kDt, p);
    CHECK(st.apart_timer_s > 0.0);
    phase_transition(st, 20.0, kDt, p);
    CHECK(st.apart_timer_s == doctest::Approx(0.0));
    // Separation must now restart from scratch.
    for (int i = 0; i < 24; ++i) phase_transition(st, 30.0, kDt, p);
    CHECK(st.phase == Phase::Lead);
}

TEST_CASE("milling never transitions on its own") {
    const ControllerParams p;
    ControllerState st;
    for (int i = 0; i < 1000; ++i) phase_transition(st, 8.0, kDt, p);
    CHECK(st.phase == Phase::Milling);
}

}  // TEST_SUITE("phase-transitions")

TEST_SUITE("carefulness-modes") {

TEST_CASE("fixed mode pins carefulness regardless of the scores") {
    const ControllerParams p;
    ModeConfig mode;
    mode.kind = ModeKind::Fixed;
    Rng rng(1);
    ControllerState st;
    st.scores.avoid = 1.0;
    for (int i = 0; i < 100; ++i) {
        mode_carefulness(st, mode, UpdateLaw::Integrator, false, true, kDt, p, rng);
        CHECK(st.carefulness == doctest::Approx(0.528));
    }
}

TEST_CASE("competent and inverse modes integrate in opposite directions") {
    const ControllerParams p;
    Rng rng(1);
    ControllerState comp, inv;
    comp.scores.avoid = inv.scores.avoid = 1.0;
    ModeConfig competent;
    ModeConfig inverse;
    inverse.kind = ModeKind::Inverse;
    mode_carefulness(comp, competent, UpdateLaw::Integrator, false, true, kDt, p, rng);
    mode_carefulness(inv, inverse, UpdateLaw::Integrator, false, true, kDt, p, rng);
    CHECK(comp.carefulness == doctest::Approx(0.5375));
    CHECK(inv.carefulness == doctest::Approx(0.4625));
}

TEST_CASE("random mode draws a bin per approach and holds it") {
    const ControllerParams p;
    ModeConfig mode;
    mode.kind = ModeKind::Random;
    Rng rng(42);
    ControllerState st;

    mode_carefulness(st, mode, UpdateLaw::Integrator, true, true, kDt, p, rng);
    const int bin = st.random.current_bin;
    REQUIRE(bin >= 0);
    REQUIRE(bin < ReferenceDistribution::kBins);
    CHECK(st.carefulness == doctest::Approx(ReferenceDistribution::bin_center(bin)));

    // Without a new approach the value holds while time is charged to the bin.
    for (int i = 0; i < 99; ++i)
        mode_carefulness(st, mode, UpdateLaw::Integrator, false, true, kDt, p, rng);
    CHECK(st.random.current_bin == bin);
    CHECK(st.random.spent_s[static_cast<std::size_t>(bin)] == doctest::Approx(100 * kDt));
    CHECK(st.random.total_approach_s == doctest::Approx(100 * kDt));

    // Outside the approach phase no time is charged.
    mode_carefulness(st, mode, UpdateLaw::Integrator, false, false, kDt, p, rng);
    CHECK(st.random.total_approach_s == doctest::Approx(100 * kDt));
}

TEST_CASE("random mode chases the deficit of the target histogram") {
    const ControllerParams p;
    ModeConfig mode;
    mode.kind = ModeKind::Random;
    mode.reference.frequencies.fill(0.0);
    mode.reference.frequencies[3] = 1.0;
    Rng rng(7);
    ControllerState st;
    // All mass in bin 3: every draw must pick it.
    for (int i = 0; i < 20; ++i) {
        mode_carefulness(st, mode, UpdateLaw::Integrator, true, true, kDt, p, rng);
        CHECK(st.random.current_bin == 3);
        CHECK(st.carefulness == doctest::Approx(0.35));
    }
    CHECK(st.random.depleted_fallbacks == 0);
}

TEST_CASE("random mode falls back to raw frequencies when every bin is ahead") {
    const ControllerParams p;
    ModeConfig mode;
    mode.kind = ModeKind::Random;
    mode.reference.frequencies.fill(0.0);
    mode.reference.frequencies[5] = 1.0;
    Rng rng(9);
    ControllerState st;
    // Pretend bin 5 already consumed far more time than the horizon allows.
    st.random.spent_s[5] = 1000.0;
    st.random.total_approach_s = 10.0;
    mode_carefulness(st, mode, UpdateLaw::Integrator, true, true, kDt, p, rng);
    CHECK(st.random.depleted_fallbacks == 1);
    CHECK(st.random.current_bin == 5);  // fallback draws from the raw histogram
}

TEST_CASE("random mode spreads draws roughly like the reference over time") {
    const ControllerParams p;
    ModeConfig mode;
    mode.kind = ModeKind::Random;
    Rng rng(123);
    ControllerState st;
    std::array<Scalar, ReferenceDistribution::kBins> time_in_bin{};
    // Many short approaches; the deficit draw should reproduce the histogram.
    for (int a = 0; a < 4000; ++a) {
        mode_carefulness(st, mode, UpdateLaw::Integrator, true, true, kDt, p, rng);
        time_in_bin[static_cast<std::size_t>(st.random.current_bin)] += kDt;
        for (int i = 0; i < 9; ++i)
            mode_carefulness(st, mode, UpdateLaw::Integrator, false, true, kDt, p, rng);
        time_in_bin[static_cast<std::size_t>(st.random.current_bin)] += 9 * kDt;
    }
    ReferenceDistribution observed{};
    for (int i = 0; i < ReferenceDistribution::kBins; ++i)
        observed.frequencies[i] = time_in_bin[static_cast<std::size_t>(i)] /
                                  st.random.total_approach_s;
    CHECK(observed.tv_distance(mode.reference) < 0.05);
}

}  // TEST_SUITE("carefulness-modes")

TEST_SUITE("controller-step") {

TEST_CASE("milling holds until the fish is released, then approach begins") {
    const ControllerParams cp;
    const FollowParams fp;
    const ArenaSpec arena;
    ModeConfig mode;
    Rng rng(5);
    ControllerState st;

    Observation obs;
    obs.robot = Pose(Vec2(50, 40), 0.0);
    obs.fish = Pose(Vec2(50, 10), 0.0);
    obs.fish_prev = obs.fish.position;
    obs.fish_released = false;

    for (int i = 0; i < 100; ++i) {
        const MotionCommand cmd = controller_step(st, obs, kDt, mode, UpdateLaw::Integrator,
                                                  cp, fp, arena, rng);
        CHECK(st.phase == Phase::Milling);
        CHECK(cmd.speed_factor == doctest::Approx(8.0 / 25.0));
        CHECK(st.approach_index == 0);
    }
    // Scores do not move while the fish is still boxed.
    CHECK(st.scores.avoid == doctest::Approx(0.5));
    CHECK(st.scores.follow == doctest::Approx(0.5));

    obs.fish_released = true;
    controller_step(st, obs, kDt, mode, UpdateLaw::Integrator, cp, fp, arena, rng);
    CHECK(st.phase == Phase::Approach);
    CHECK(st.approach_index == 1);
}

TEST_CASE("activation is one-way: boxed observations never restore milling") {
    const ControllerParams cp;
    const FollowParams fp;
    const ArenaSpec arena;
    ModeConfig mode;
    Rng rng(5);
    ControllerState st;
    Observation obs;
    obs.robot = Pose(Vec2(50, 40), 0.0);
    obs.fish = Pose(Vec2(50, 10), 0.0);
    obs.fish_prev = obs.fish.position;
    obs.fish_released = true;
    controller_step(st, obs, kDt, mode, UpdateLaw::Integrator, cp, fp, arena, rng);
    REQUIRE(st.phase == Phase::Approach);
    obs.fish_released = false;
    controller_step(st, obs, kDt, mode, UpdateLaw::Integrator, cp, fp, arena, rng);
    CHECK(st.phase == Phase::Approach);
}

TEST_CASE("a comfortable fish promotes approach to lead and waypoints switch") {
    const ControllerParams cp;
    const FollowParams fp;
    const ArenaSpec arena;
    ModeConfig mode;
    mode.kind = ModeKind::Fixed;
    Rng rng(5);
    ControllerState st;

    Observation obs;
    obs.robot = Pose(Vec2(50, 40), 0.0);
    obs.fish = Pose(Vec2(50, 32), 0.0);  // 8 cm away: inside the comfort band
    obs.fish_prev = obs.fish.position;
    obs.fish_released = true;

    int lead_entry_step = -1;
    for (int i = 0; i < 60; ++i) {
        controller_step(st, obs, kDt, mode, UpdateLaw::Integrator, cp, fp, arena, rng);
        if (st.phase == Phase::Lead) {
            lead_entry_step = i;
            break;
        }
    }
    // The dwell accrues from the activation step; 2 s at 25 Hz is 50 steps.
    CHECK(lead_entry_step == 49);

    const MotionCommand cmd =
        controller_step(st, obs, kDt, mode, UpdateLaw::Integrator, cp, fp, arena, rng);
    CHECK(cmd.speed_factor == doctest::Approx(cp.lead_speed_factor));
    CHECK(st.has_lead_target);
    // Lead waypoints head for the nearest circuit corner, not the fish.
    CHECK((cmd.target - Vec2(50, 40)).norm() == doctest::Approx(cp.lead_burst_dist));
}

TEST_CASE("losing the fish in lead re-enters approach and bumps the index") {
    const ControllerParams cp;
    const FollowParams fp;
    const ArenaSpec arena;
    ModeConfig mode;
    mode.kind = ModeKind::Fixed;
    Rng rng(5);
    ControllerState st;

    Observation obs;
    obs.robot = Pose(Vec2(50, 40), 0.0);
    obs.fish = Pose(Vec2(50, 32), 0.0);
    obs.fish_prev = obs.fish.position;
    obs.fish_released = true;
    for (int i = 0; i < 52 && st.phase != Phase::Lead; ++i)
        controller_step(st, obs, kDt, mode, UpdateLaw::Integrator, cp, fp, arena, rng);
    REQUIRE(st.phase == Phase::Lead);
    CHECK(st.approach_index == 1);

    obs.fish = Pose(Vec2(10, 90), 0.0);  // far beyond the follow distance
    obs.fish_prev = obs.fish.position;
    for (int i = 0; i < 30 && st.phase != Phase::Approach; ++i)
        controller_step(st, obs, kDt, mode, UpdateLaw::Integrator, cp, fp, arena, rng);
    CHECK(st.phase == Phase::Approach);
    CHECK(st.approach_index == 2);
}

TEST_CASE("carefulness stays in bounds under a noisy fish") {
    const ControllerParams cp;
    const FollowParams fp;
    const ArenaSpec arena;
    ModeConfig mode;
    Rng rng(77);
    Rng noise(123);
    ControllerState st;

    Observation obs;
    obs.robot = Pose(Vec2(50, 40), 0.0);
    obs.fish = Pose(Vec2(55, 45), 0.0);
    obs.fish_prev = obs.fish.position;
    obs.fish_released = true;
    for (int i = 0; i < 2000; ++i) {
        obs.fish_prev = obs.fish.position;
        const Vec2 jitter(noise.uniform(-0.4, 0.4), noise.uniform(-0.4, 0.4));
        obs.fish = Pose(arena.clamped(obs.fish.position + jitter), 0.0);
        controller_step(st, obs, kDt, mode, UpdateLaw::Integrator, cp, fp, arena, rng);
        CHECK(st.carefulness >= 0.0);
        CHECK(st.carefulness <= 1.0);
        CHECK(st.scores.avoid >= 0.0);
        CHECK(st.scores.avoid <= 1.0);
    }
}

TEST_CASE("mode and law names round trip") {
    for (ModeKind k : {ModeKind::Competent, ModeKind::Fixed, ModeKind::Random,
                       ModeKind::Inverse})
        CHECK(mode_from_name(mode_name(k)) == k);
    for (UpdateLaw l : {UpdateLaw::Integrator, UpdateLaw::Leaky})
        CHECK(law_from_name(law_name(l)) == l);
    CHECK_THROWS_AS(mode_from_name("bold"), std::invalid_argument);
    CHECK_THROWS_AS(law_from_name("pid"), std::invalid_argument);
}

}  // TEST_SUITE("controller-step")
