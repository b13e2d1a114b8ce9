#include <doctest.h>

#include <cmath>

#include "leadsim/kinematics.hpp"

using namespace leadsim;

namespace {
constexpr Scalar kDt = 0.04;

MotionCommand cmd_to(Scalar x, Scalar y, Scalar factor) {
    MotionCommand c;
    c.target = Vec2(x, y);
    c.speed_factor = factor;
    return c;
}
}  // namespace

TEST_SUITE("robot-motion") {

TEST_CASE("facing away from the target: turn in place, no forward drive") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    const Pose pose(Vec2(50, 50), kPi);  // target is due east, robot faces west
    const RobotStep step = advance_robot(pose, 0.0, cmd_to(80, 50, 1.0), kDt, mp, cp, arena);
    CHECK(step.speed == doctest::Approx(0.0));
    CHECK(step.pose.position.x() == doctest::Approx(50.0));
    CHECK(step.pose.position.y() == doctest::Approx(50.0));
    // Heading moved by exactly the per-step turn budget.
    CHECK(std::abs(wrap_angle(step.pose.heading - pose.heading)) ==
          doctest::Approx(mp.max_turn_rate * kDt));
}

TEST_CASE("the turn budget is never exceeded on the way to alignment") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    Pose pose(Vec2(50, 50), kPi);
    Scalar speed = 0.0;
    const MotionCommand cmd = cmd_to(80, 50, 1.0);
    Scalar prev_heading = pose.heading;
    for (int i = 0; i < 40; ++i) {
        const RobotStep step = advance_robot(pose, speed, cmd, kDt, mp, cp, arena);
        CHECK(std::abs(wrap_angle(step.pose.heading - prev_heading)) <=
              mp.max_turn_rate * kDt + 1e-12);
        prev_heading = step.pose.heading;
        pose = step.pose;
        speed = step.speed;
    }
    // A full turn rate of 2*pi rad/s closes a half-turn within half a second.
    CHECK(std::abs(wrap_angle(pose.heading)) < 1e-9);
    CHECK(speed > 0.0);
}

TEST_CASE("drive begins only once inside the gate angle") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    // Just outside the 30-degree gate: still no forward motion.
    const Pose outside(Vec2(50, 50), mp.drive_gate_angle + 0.3);
    const RobotStep s1 = advance_robot(outside, 0.0, cmd_to(80, 50, 1.0), kDt, mp, cp, arena);
    CHECK(s1.speed == doctest::Approx(0.0));
    // Just inside the gate: acceleration kicks in.
    const Pose inside(Vec2(50, 50), mp.drive_gate_angle - 0.05);
    const RobotStep s2 = advance_robot(inside, 0.0, cmd_to(80, 50, 1.0), kDt, mp, cp, arena);
    CHECK(s2.speed > 0.0);
}

TEST_CASE("speed ramps with bounded acceleration toward the commanded cruise") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    Pose pose(Vec2(10, 50), 0.0);  // already aligned with a far target
    Scalar speed = 0.0;
    const MotionCommand cmd = cmd_to(95, 50, 0.8717);
    const Scalar cruise = 0.8717 * cp.speed_unit;
    Scalar prev = speed;
    for (int i = 0; i < 50; ++i) {
        const RobotStep step = advance_robot(pose, speed, cmd, kDt, mp, cp, arena);
        CHECK(step.speed - prev <= mp.accel * kDt + 1e-12);
        CHECK(step.speed <= cruise + 1e-9);
        prev = step.speed;
        pose = step.pose;
        speed = step.speed;
    }
    CHECK(speed == doctest::Approx(cruise));
}

TEST_CASE("the commanded speed is capped at the plant maximum") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    Pose pose(Vec2(5, 50), 0.0);
    Scalar speed = 0.0;
    const MotionCommand cmd = cmd_to(95, 50, 10.0);  // absurd factor: 250 cm/s requested
    for (int i = 0; i < 60; ++i) {
        const RobotStep step = advance_robot(pose, speed, cmd, kDt, mp, cp, arena);
        pose = step.pose;
        speed = step.speed;
        CHECK(speed <= cp.max_speed + 1e-9);
    }
    CHECK(speed == doctest::Approx(cp.max_speed));
}

TEST_CASE("the robot brakes into the arrival radius and stops") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    Pose pose(Vec2(40, 50), 0.0);
    Scalar speed = 0.0;
    const MotionCommand cmd = cmd_to(60, 50, 1.0);
    Scalar min_dist = 1e9;
    for (int i = 0; i < 500; ++i) {
        const RobotStep step = advance_robot(pose, speed, cmd, kDt, mp, cp, arena);
        pose = step.pose;
        speed = step.speed;
        min_dist = std::min(min_dist, (cmd.target - pose.position).norm());
    }
    CHECK(speed == doctest::Approx(0.0));
    // Never overshoots past the target by more than the stopping slack.
    CHECK((cmd.target - pose.position).norm() <= mp.arrival_radius + 0.5);
    CHECK(min_dist <= mp.arrival_radius + 0.5);
}

TEST_CASE("inside the arrival radius the robot holds still") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    const Pose pose(Vec2(50, 50), 1.3);
    const RobotStep step =
        advance_robot(pose, 0.0, cmd_to(50.5, 50, 1.0), kDt, mp, cp, arena);
    CHECK(step.speed == doctest::Approx(0.0));
    CHECK(step.pose.position.x() == doctest::Approx(50.0));
    CHECK(step.pose.heading == doctest::Approx(1.3));  // no target chase, no turn
}

TEST_CASE("hitting a wall clamps the position and kills the speed") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    Pose pose(Vec2(99.5, 50), 0.0);  // facing the east wall at speed
    const RobotStep step = advance_robot(pose, 30.0, cmd_to(130, 50, 1.2), kDt, mp, cp, arena);
    CHECK(step.pose.position.x() == doctest::Approx(arena.side));
    CHECK(step.speed == doctest::Approx(0.0));
}

TEST_CASE("a full waypoint chase converges from any initial heading") {
    const RobotMotionParams mp;
    const ControllerParams cp;
    const ArenaSpec arena;
    for (Scalar h0 : {0.0, 1.0, -2.0, 3.0}) {
        Pose pose(Vec2(20, 20), h0);
        Scalar speed = 0.0;
        const MotionCommand cmd = cmd_to(80, 70, 1.0);
        int steps = 0;
        while ((cmd.target - pose.position).norm() > mp.arrival_radius + 0.5 && steps < 2000) {
            const RobotStep step = advance_robot(pose, speed, cmd, kDt, mp, cp, arena);
            pose = step.pose;
            speed = step.speed;
            ++steps;
        }
        CHECK(steps < 2000);
    }
}

}  // TEST_SUITE("robot-motion")

TEST_SUITE("point-motion") {

TEST_CASE("advance_point integrates velocity inside the arena") {
    const ArenaSpec arena;
    const Vec2 next = advance_point(Vec2(50, 50), Vec2(10, -5), kDt, arena, WallMode::Clamp);
    CHECK(next.x() == doctest::Approx(50.4));
    CHECK(next.y() == doctest::Approx(49.8));
}

TEST_CASE("clamp mode pins an overshoot to the wall") {
    const ArenaSpec arena;
    const Vec2 next = advance_point(Vec2(99.9, 50), Vec2(50, 0), 0.1, arena, WallMode::Clamp);
    CHECK(next.x() == doctest::Approx(100.0));
    CHECK(next.y() == doctest::Approx(50.0));
}

TEST_CASE("reflect mode folds an overshoot back inside") {
    const ArenaSpec arena;
    // 99.9 + 5 = 104.9 -> folds to 95.1.
    const Vec2 next = advance_point(Vec2(99.9, 50), Vec2(50, 0), 0.1, arena, WallMode::Reflect);
    CHECK(next.x() == doctest::Approx(95.1));
    // Below zero folds the same way: -3 -> 3.
    const Vec2 low = advance_point(Vec2(1, 50), Vec2(-40, 0), 0.1, arena, WallMode::Reflect);
    CHECK(low.x() == doctest::Approx(3.0));
}

TEST_CASE("reflect mode degrades to a clamp on absurd overshoots") {
    const ArenaSpec arena;
    const Vec2 next =
        advance_point(Vec2(50, 50), Vec2(10000, 0), 0.1, arena, WallMode::Reflect);
    CHECK(arena.contains(next));
}

TEST_CASE("both modes keep every step inside the arena") {
    const ArenaSpec arena;
    for (WallMode mode : {WallMode::Clamp, WallMode::Reflect}) {
        Vec2 p(50, 50);
        Scalar vx = 37, vy = -53;
        for (int i = 0; i < 500; ++i) {
            p = advance_point(p, Vec2(vx, vy), kDt, arena, mode);
            CHECK(arena.contains(p));
        }
    }
}

}  // TEST_SUITE("point-motion")
