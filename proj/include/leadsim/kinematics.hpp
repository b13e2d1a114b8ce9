#pragma once

#include "leadsim/arena.hpp"
#include "leadsim/controller.hpp"
#include "leadsim/params.hpp"
#include "leadsim/types.hpp"

namespace leadsim {

/// Robot pose + scalar forward speed after one motion step.
struct RobotStep {
    Pose pose;
    Scalar speed = 0;  ///< cm/s
};

/// Advance the robot one step toward cmd.target. The robot turns at most
/// max_turn_rate * dt toward the target, drives forward only when its
/// heading is within drive_gate_angle of the target bearing, ramps speed
/// with bounded accel/decel toward min(speed_factor * speed_unit,
/// max_speed), brakes so it stops inside arrival_radius, and never leaves
/// the arena (clamped at walls with speed zeroed on contact).
RobotStep advance_robot(const Pose& pose, Scalar speed, const MotionCommand& cmd, Scalar dt,
                        const RobotMotionParams& mp, const ControllerParams& cp,
                        const ArenaSpec& arena);

/// How a point moving past an arena wall is handled.
enum class WallMode { Clamp, Reflect };

/// Integrate a velocity over one step and keep the result inside the arena,
/// either by clamping to the wall or by folding (mirror reflection).
Vec2 advance_point(const Vec2& pos, const Vec2& velocity, Scalar dt, const ArenaSpec& arena,
                   WallMode mode);

}  // namespace leadsim
