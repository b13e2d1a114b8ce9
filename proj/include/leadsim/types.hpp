#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace leadsim {

using Scalar = double;
using Vec2 = Eigen::Vector2d;

inline constexpr Scalar kPi = 3.141592653589793238462643383279502884;

/// Wrap an angle into [-pi, pi).
inline Scalar wrap_angle(Scalar a) {
    return a - 2.0 * kPi * std::floor((a + kPi) / (2.0 * kPi));
}

/// 2-D cross product (z-component of the 3-D cross).
inline Scalar cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline Vec2 heading_vec(Scalar heading) { return Vec2(std::cos(heading), std::sin(heading)); }

/// Position in cm plus heading in [-pi, pi). Heading is the movement
/// direction for fish and the drive direction for the robot.
struct Pose {
    Vec2 position{Vec2::Zero()};
    Scalar heading{0.0};

    Pose() = default;
    Pose(const Vec2& pos, Scalar h) : position(pos), heading(wrap_angle(h)) {}

    Vec2 direction() const { return heading_vec(heading); }
};

/// Thrown when an operation's geometry collapses (coincident agents,
/// zero-length direction). Callers substitute a documented fallback.
struct DegenerateGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Clip x to [a, b], then map linearly onto [0, 1].
inline Scalar clip_normalize(Scalar x, Scalar a, Scalar b) {
    if (!(a < b)) throw std::invalid_argument("clip_normalize: requires a < b");
    const Scalar c = std::clamp(x, a, b);
    return (c - a) / (b - a);
}

/// Counterclockwise rotation of v by angle (radians).
inline Vec2 rotate(const Vec2& v, Scalar angle) { return Eigen::Rotation2Dd(angle) * v; }

inline Scalar clamp01(Scalar x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace leadsim
