#pragma once

#include <array>
#include <utility>

#include "leadsim/arena.hpp"
#include "leadsim/metrics.hpp"
#include "leadsim/params.hpp"
#include "leadsim/phase.hpp"
#include "leadsim/rng.hpp"
#include "leadsim/types.hpp"

namespace leadsim {

/// Carefulness update rule.
///  - Integrator: a += rate * (avoid - baseline), clamped; a random walk
///    that holds its level when the drive vanishes.
///  - Leaky: a = (1 - rate) * a + rate * (avoid - baseline) * dt, clamped;
///    decays toward zero without sustained drive.
enum class UpdateLaw { Integrator, Leaky };

/// How the controller chooses its carefulness each step.
enum class ModeKind { Competent, Fixed, Random, Inverse };

struct ModeConfig {
    ModeKind kind = ModeKind::Competent;
    /// Carefulness held by Fixed mode.
    Scalar fixed_value = 0.528;
    /// Target carefulness histogram matched by Random mode.
    ReferenceDistribution reference = pretrial_reference_distribution();
};

const char* mode_name(ModeKind kind);
ModeKind mode_from_name(const std::string& name);
const char* law_name(UpdateLaw law);
UpdateLaw law_from_name(const std::string& name);

/// Bookkeeping for Random mode: carefulness is re-drawn at every Approach
/// entry from the deficit between the target histogram and the approach time
/// already spent per bin, so the realized time-in-bin distribution tracks
/// the target.
struct RandomModeState {
    std::array<Scalar, ReferenceDistribution::kBins> spent_s{};
    Scalar total_approach_s = 0;
    int current_bin = -1;
    int depleted_fallbacks = 0;  ///< draws where every deficit was zero
};

/// What the controller observes each step. fish_prev is the fish position
/// one step earlier (equal to the current position on the first step).
struct Observation {
    Pose robot;
    Pose fish;
    Vec2 fish_prev = Vec2::Zero();
    bool fish_released = false;
};

/// Where to go and how fast, as a fraction of the speed unit.
struct MotionCommand {
    Vec2 target = Vec2::Zero();
    Scalar speed_factor = 0;
};

struct ControllerState {
    Phase phase = Phase::Milling;
    Scalar carefulness = 0.5;
    ScoreState scores;
    Scalar time_s = 0;          ///< since controller start (drives milling)
    Scalar comfort_timer_s = 0; ///< contiguous time in the comfort band
    Scalar apart_timer_s = 0;   ///< contiguous time beyond follow distance in Lead
    int corner_index = 0;       ///< next arena corner on the lead circuit
    int approach_index = 0;     ///< Approach entries so far
    int side = 1;               ///< last chosen approach side (+1 left, -1 right)
    bool has_prev_robot = false;
    Vec2 prev_robot_pos = Vec2::Zero();
    bool has_lead_target = false;
    Vec2 lead_target = Vec2::Zero();
    bool has_approach_target = false;
    Vec2 approach_target_pos = Vec2::Zero();
    RandomModeState random;
};

/// Outcome of an A <-> L transition check.
struct TransitionResult {
    Phase phase = Phase::Milling;
    bool entered_approach = false;
    bool entered_lead = false;
};

/// One carefulness update. drive_sign = -1 inverts the adaptation direction
/// (used by Inverse mode). Result clamped to [0, 1].
Scalar update_carefulness(Scalar prev, Scalar avoid_score, const ControllerParams& p,
                          UpdateLaw law, Scalar dt, Scalar drive_sign = 1);

/// +1 when the robot lies to the left of the fish's heading, -1 to the
/// right; ties (robot dead ahead/behind) keep prev_side.
int side_indicator(const Pose& fish, const Vec2& robot_pos, int prev_side);

/// Approach waypoint: a point offset_dist ahead of the fish on the fish ->
/// robot line, rotated around the robot by carefulness * 90 degrees toward
/// `side`, then clamped into the arena. Throws DegenerateGeometry when the
/// robot and fish coincide.
Vec2 approach_target(const Pose& robot, const Pose& fish, Scalar carefulness, int side,
                     const ControllerParams& p, const ArenaSpec& arena);

/// Speed factor for a phase (multiplied by speed_unit to get cm/s).
Scalar speed_factor(Scalar carefulness, Phase phase, const ControllerParams& p);

/// Advance the comfort/apart timers and switch between Approach and Lead.
/// Lead is entered only from inside the comfort band, so it can never start
/// with the fish farther than comfort_dist.
TransitionResult phase_transition(ControllerState& state, Scalar fish_dist, Scalar dt,
                                  const ControllerParams& p);

/// Next waypoint on the lead circuit: at most burst_dist toward the current
/// corner, cycling corners clockwise on arrival.
std::pair<Vec2, int> lead_next_target(const Vec2& robot_pos, int corner_index,
                                      const ControllerParams& p, const ArenaSpec& arena);

/// Milling waypoint at time t: a point moving around a circle in front of
/// the start box door at the milling speed.
Vec2 milling_target(Scalar time_s, const ControllerParams& p, const ArenaSpec& arena);

/// Carefulness for this step under the configured mode. approach_started
/// marks the first step of a new Approach phase (Random mode re-draws its
/// bin there). Approach-phase time is charged to the active bin.
Scalar mode_carefulness(ControllerState& state, const ModeConfig& mode, UpdateLaw law,
                        bool approach_started, bool in_approach, Scalar dt,
                        const ControllerParams& p, Rng& rng);

/// Full controller step: update scores, run phase transitions, adapt
/// carefulness, and emit a motion command. Mutates state; pure in
/// (state, obs, rng) -> (state', command).
MotionCommand controller_step(ControllerState& state, const Observation& obs, Scalar dt,
                              const ModeConfig& mode, UpdateLaw law, const ControllerParams& cp,
                              const FollowParams& fp, const ArenaSpec& arena, Rng& rng);

}  // namespace leadsim
