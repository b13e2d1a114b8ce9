#include "leadsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leadsim {

const char* mode_name(ModeKind kind) {
    switch (kind) {
        case ModeKind::Competent: return "competent";
        case ModeKind::Fixed: return "fixed";
        case ModeKind::Random: return "random";
        case ModeKind::Inverse: return "inverse";
    }
    return "?";
}

ModeKind mode_from_name(const std::string& name) {
    if (name == "competent") return ModeKind::Competent;
    if (name == "fixed") return ModeKind::Fixed;
    if (name == "random") return ModeKind::Random;
    if (name == "inverse") return ModeKind::Inverse;
    throw std::invalid_argument("unknown mode '" + name + "'");
}

const char* law_name(UpdateLaw law) {
    return law == UpdateLaw::Integrator ? "integrator" : "leaky";
}

UpdateLaw law_from_name(const std::string& name) {
    if (name == "integrator") return UpdateLaw::Integrator;
    if (name == "leaky") return UpdateLaw::Leaky;
    throw std::invalid_argument("unknown carefulness law '" + name + "'");
}

Scalar update_carefulness(Scalar prev, Scalar avoid_score, const ControllerParams& p,
                          UpdateLaw law, Scalar dt, Scalar drive_sign) {
    const Scalar drive = drive_sign * (avoid_score - p.avoid_baseline);
    switch (law) {
        case UpdateLaw::Integrator:
            return clamp01(prev + p.carefulness_rate * drive);
        case UpdateLaw::Leaky:
            return clamp01((Scalar(1) - p.carefulness_rate) * prev +
                           p.carefulness_rate * drive * dt);
    }
    return prev;
}

int side_indicator(const Pose& fish, const Vec2& robot_pos, int prev_side) {
    const Scalar c = cross2(fish.direction(), Vec2(robot_pos - fish.position));
    if (c > Scalar(0)) return 1;
    if (c < Scalar(0)) return -1;
    return prev_side;
}

Vec2 approach_target(const Pose& robot, const Pose& fish, Scalar carefulness, int side,
                     const ControllerParams& p, const ArenaSpec& arena) {
    const Vec2 to_robot = robot.position - fish.position;
    const Scalar dist = to_robot.norm();
    if (dist <= Scalar(0))
        throw DegenerateGeometry("approach_target: robot and fish coincide");
    const Vec2 goal = fish.position + p.approach_offset * (to_robot / dist);
    const Scalar angle = carefulness * (kPi / 2) * static_cast<Scalar>(side);
    const Vec2 target = robot.position + rotate(Vec2(goal - robot.position), angle);
    return arena.clamped(target);
}

Scalar speed_factor(Scalar carefulness, Phase phase, const ControllerParams& p) {
    switch (phase) {
        case Phase::Milling: return p.milling_speed / p.speed_unit;
        case Phase::Approach: return Scalar(1) - carefulness + p.base_speed_factor;
        case Phase::Lead: return p.lead_speed_factor;
    }
    return 0;
}

TransitionResult phase_transition(ControllerState& state, Scalar fish_dist, Scalar dt,
                                  const ControllerParams& p) {
    TransitionResult res;
    switch (state.phase) {
        case Phase::Milling:
            break;  // activation is handled by controller_step
        case Phase::Approach:
            if (fish_dist > p.comfort_dist) {
                state.comfort_timer_s = 0;
            } else if (fish_dist >= p.close_dist) {
                state.comfort_timer_s += dt;
                if (state.comfort_timer_s >= p.comfort_dwell_s) {
                    state.phase = Phase::Lead;
                    state.comfort_timer_s = 0;
                    state.apart_timer_s = 0;
                    state.has_lead_target = false;
                    res.entered_lead = true;
                }
            }
            // closer than close_dist: timer holds, no transition
            break;
        case Phase::Lead:
            if (fish_dist > p.lead_follow_dist) {
                state.apart_timer_s += dt;
                if (state.apart_timer_s >= p.lead_apart_tolerance_s) {
                    state.phase = Phase::Approach;
                    state.apart_timer_s = 0;
                    state.comfort_timer_s = 0;
                    res.entered_approach = true;
                }
            } else {
                state.apart_timer_s = 0;
            }
            break;
    }
    res.phase = state.phase;
    return res;
}

std::pair<Vec2, int> lead_next_target(const Vec2& robot_pos, int corner_index,
                                      const ControllerParams& p, const ArenaSpec& arena) {
    const auto corners = arena.lead_corners();
    int idx = corner_index % static_cast<int>(corners.size());
    Vec2 corner = corners[static_cast<std::size_t>(idx)];
    Scalar dist = (corner - robot_pos).norm();
    if (dist <= p.corner_arrival_dist) {
        idx = (idx + 1) % static_cast<int>(corners.size());
        corner = corners[static_cast<std::size_t>(idx)];
        dist = (corner - robot_pos).norm();
    }
    if (dist <= p.lead_burst_dist) return {corner, idx};
    return {Vec2(robot_pos + p.lead_burst_dist * (corner - robot_pos) / dist), idx};
}

Vec2 milling_target(Scalar time_s, const ControllerParams& p, const ArenaSpec& arena) {
    const Vec2 center = arena.door_center() + p.milling_door_offset * arena.door_normal();
    const Scalar radius = p.milling_diameter / 2;
    const Scalar omega = p.milling_speed / radius;
    const Scalar a = omega * time_s;
    return center + radius * Vec2(std::cos(a), std::sin(a));
}

namespace {

/// Draw a Random-mode bin index favoring bins whose share of approach time
/// lags the target histogram.
int draw_deficit_bin(RandomModeState& rs, const ReferenceDistribution& ref, Scalar dt,
                     Rng& rng) {
    std::array<Scalar, ReferenceDistribution::kBins> weights{};
    Scalar total = 0;
    const Scalar horizon = rs.total_approach_s + dt;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] = std::max(Scalar(0), ref.frequencies[i] * horizon - rs.spent_s[i]);
        total += weights[i];
    }
    if (total <= Scalar(0)) {
        ++rs.depleted_fallbacks;
        weights = ref.frequencies;
    }
    return static_cast<int>(rng.weighted_index(weights));
}

}  // namespace

Scalar mode_carefulness(ControllerState& state, const ModeConfig& mode, UpdateLaw law,
                        bool approach_started, bool in_approach, Scalar dt,
                        const ControllerParams& p, Rng& rng) {
    switch (mode.kind) {
        case ModeKind::Competent:
            state.carefulness =
                update_carefulness(state.carefulness, state.scores.avoid, p, law, dt);
            break;
        case ModeKind::Inverse:
            state.carefulness =
                update_carefulness(state.carefulness, state.scores.avoid, p, law, dt, Scalar(-1));
            break;
        case ModeKind::Fixed:
            state.carefulness = clamp01(mode.fixed_value);
            break;
        case ModeKind::Random:
            if (approach_started)
                state.random.current_bin = draw_deficit_bin(state.random, mode.reference, dt, rng);
            if (state.random.current_bin >= 0)
                state.carefulness = mode.reference.bin_center(state.random.current_bin);
            if (in_approach && state.random.current_bin >= 0) {
                state.random.spent_s[static_cast<std::size_t>(state.random.current_bin)] += dt;
                state.random.total_approach_s += dt;
            }
            break;
    }
    return state.carefulness;
}

MotionCommand controller_step(ControllerState& state, const Observation& obs, Scalar dt,
                              const ModeConfig& mode, UpdateLaw law, const ControllerParams& cp,
                              const FollowParams& fp, const ArenaSpec& arena, Rng& rng) {
    const Scalar fish_dist = (obs.fish.position - obs.robot.position).norm();
    bool approach_started = false;

    if (state.phase == Phase::Milling && obs.fish_released) {
        state.phase = Phase::Approach;
        state.comfort_timer_s = 0;
        state.apart_timer_s = 0;
        ++state.approach_index;
        approach_started = true;
    }

    if (state.phase != Phase::Milling) {
        // Scores come from the fish displacement over the previous step,
        // projected toward where the robot was when that step began.
        const Vec2 robot_ref = state.has_prev_robot ? state.prev_robot_pos : obs.robot.position;
        Scalar d = 0;
        if ((robot_ref - obs.fish_prev).norm() > Scalar(0))
            d = approach_distance(robot_ref, obs.fish_prev, obs.fish.position, dt);
        const bool in_zone = fish_dist <= cp.interaction_zone;
        state.scores.update(d, in_zone, cp, fp);

        const TransitionResult tr = phase_transition(state, fish_dist, dt, cp);
        if (tr.entered_approach) {
            ++state.approach_index;
            approach_started = true;
        }

        mode_carefulness(state, mode, law, approach_started,
                         state.phase == Phase::Approach, dt, cp, rng);
    }

    MotionCommand cmd;
    cmd.speed_factor = speed_factor(state.carefulness, state.phase, cp);
    switch (state.phase) {
        case Phase::Milling:
            cmd.target = milling_target(state.time_s, cp, arena);
            break;
        case Phase::Approach: {
            state.side = side_indicator(obs.fish, obs.robot.position, state.side);
            if (fish_dist > Scalar(0)) {
                cmd.target =
                    approach_target(obs.robot, obs.fish, state.carefulness, state.side, cp, arena);
                state.approach_target_pos = cmd.target;
                state.has_approach_target = true;
            } else {
                // Degenerate geometry: hold the previous waypoint.
                cmd.target =
                    state.has_approach_target ? state.approach_target_pos : obs.robot.position;
            }
            break;
        }
        case Phase::Lead: {
            if (state.has_lead_target &&
                (state.lead_target - obs.robot.position).norm() <= cp.corner_arrival_dist)
                state.has_lead_target = false;
            if (!state.has_lead_target && fish_dist <= cp.lead_follow_dist) {
                auto [target, idx] =
                    lead_next_target(obs.robot.position, state.corner_index, cp, arena);
                state.lead_target = target;
                state.corner_index = idx;
                state.has_lead_target = true;
            }
            // Between bursts with the fish too far back, wait in place.
            cmd.target = state.has_lead_target ? state.lead_target : obs.robot.position;
            break;
        }
    }

    state.prev_robot_pos = obs.robot.position;
    state.has_prev_robot = true;
    state.time_s += dt;
    return cmd;
}

}  // namespace leadsim
