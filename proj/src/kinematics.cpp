#include "leadsim/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace leadsim {

RobotStep advance_robot(const Pose& pose, Scalar speed, const MotionCommand& cmd, Scalar dt,
                        const RobotMotionParams& mp, const ControllerParams& cp,
                        const ArenaSpec& arena) {
    const Vec2 to_target = cmd.target - pose.position;
    const Scalar dist = to_target.norm();
    const Scalar cruise = std::min(cmd.speed_factor * cp.speed_unit, cp.max_speed);

    Scalar desired = 0;
    Scalar heading = pose.heading;
    if (dist > mp.arrival_radius) {
        // Brake so speed reaches ~0 at the arrival radius.
        const Scalar brake = std::sqrt(2 * mp.decel * (dist - mp.arrival_radius));
        desired = std::min(cruise, brake);

        const Scalar bearing = std::atan2(to_target.y(), to_target.x());
        const Scalar diff = wrap_angle(bearing - pose.heading);
        const Scalar max_turn = mp.max_turn_rate * dt;
        heading = wrap_angle(pose.heading + std::clamp(diff, -max_turn, max_turn));
        // Only drive forward once roughly facing the target.
        if (std::abs(wrap_angle(bearing - heading)) > mp.drive_gate_angle) desired = 0;
    }

    Scalar next_speed =
        speed + std::clamp(desired - speed, -mp.decel * dt, mp.accel * dt);
    next_speed = std::max(Scalar(0), next_speed);

    Vec2 next_pos = pose.position + next_speed * dt * heading_vec(heading);
    if (!arena.contains(next_pos)) {
        next_pos = arena.clamped(next_pos);
        next_speed = 0;
    }
    return {Pose(next_pos, heading), next_speed};
}

Vec2 advance_point(const Vec2& pos, const Vec2& velocity, Scalar dt, const ArenaSpec& arena,
                   WallMode mode) {
    const Vec2 raw = pos + velocity * dt;
    return mode == WallMode::Clamp ? arena.clamped(raw) : arena.reflected(raw);
}

}  // namespace leadsim
