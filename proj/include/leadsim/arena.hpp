#pragma once

#include <array>
#include <stdexcept>

#include "leadsim/types.hpp"

namespace leadsim {

/// Square experimental arena with a triangular start box centered on the
/// south wall. The box's apex touches the wall and its open side (with the
/// door in the middle) faces the arena center, so fish exit northward.
struct ArenaSpec {
    Scalar side = 100.0;            // cm
    Scalar corner_inset = 10.0;     // cm, lead waypoints from adjacent walls
    Scalar startbox_side = 19.0;    // cm, triangle edge length
    Scalar startbox_door_width = 3.0;  // cm

    void validate() const {
        if (!(corner_inset > 0.0 && corner_inset < side / 2.0))
            throw std::invalid_argument("ArenaSpec: corner_inset must be in (0, side/2)");
        if (!(startbox_side > 0.0) || startbox_height() >= side ||
            startbox_side >= side)
            throw std::invalid_argument("ArenaSpec: start box must fit inside the arena");
        if (!(startbox_door_width > 0.0 && startbox_door_width < startbox_side))
            throw std::invalid_argument("ArenaSpec: door must be narrower than the box side");
    }

    bool contains(const Vec2& p) const {
        return p.x() >= 0.0 && p.x() <= side && p.y() >= 0.0 && p.y() <= side;
    }

    Vec2 clamped(const Vec2& p) const {
        return Vec2(std::clamp(p.x(), 0.0, side), std::clamp(p.y(), 0.0, side));
    }

    /// Reflect a point that stepped past a wall back inside.
    Vec2 reflected(const Vec2& p) const {
        auto fold = [this](Scalar v) {
            if (v < 0.0) v = -v;
            if (v > side) v = 2.0 * side - v;
            return std::clamp(v, 0.0, side);  // double overshoot degenerates to clamp
        };
        return Vec2(fold(p.x()), fold(p.y()));
    }

    /// Lead waypoints inset from the walls, in clockwise cycling order.
    std::array<Vec2, 4> lead_corners() const {
        const Scalar c = corner_inset;
        return {Vec2(c, c), Vec2(c, side - c), Vec2(side - c, side - c), Vec2(side - c, c)};
    }

    /// Height of the equilateral start box triangle; the door plane.
    Scalar startbox_height() const { return startbox_side * std::sqrt(3.0) / 2.0; }

    Vec2 door_center() const { return Vec2(side / 2.0, startbox_height()); }

    /// Outward (arena-facing) door normal.
    Vec2 door_normal() const { return Vec2(0.0, 1.0); }

    Vec2 startbox_spawn() const {
        // Triangle centroid: apex on the wall, base on the door plane.
        return Vec2(side / 2.0, startbox_height() * 2.0 / 3.0);
    }

    /// True once the fish center is `margin` cm past the door plane.
    bool past_release_plane(const Vec2& fish, Scalar margin) const {
        return (fish - door_center()).dot(door_normal()) >= margin;
    }
};

/// Simulation clock; dt is derived so dt * rate == 1 exactly as stored.
struct TimeBase {
    Scalar rate = 25.0;  // Hz

    void validate() const {
        if (!(rate > 0.0)) throw std::invalid_argument("TimeBase: rate must be positive");
    }

    Scalar dt() const { return 1.0 / rate; }
    int steps_for(Scalar seconds) const {
        return static_cast<int>(std::llround(seconds * rate));
    }
};

}  // namespace leadsim
