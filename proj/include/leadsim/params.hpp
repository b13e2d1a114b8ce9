#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "leadsim/arena.hpp"
#include "leadsim/types.hpp"

namespace leadsim {

/// Robot behavior constants. Speeds are cm/s, distances cm, times seconds.
struct ControllerParams {
    // Event clipping bounds for projected fish motion.
    Scalar speed_clip_lo = 2.5;   // below: tangential/slow, ignored
    Scalar speed_clip_hi = 10.0;  // above: saturates the event
    Scalar interaction_zone = 56.0;  // events only count within this distance

    // Avoidance score (exponential average of avoidance events).
    Scalar avoid_smoothing = 0.0025;
    Scalar avoid_gain = 8.0;
    Scalar avoid_baseline = 0.5;

    // Carefulness memory.
    Scalar carefulness_rate = 0.075;
    Scalar carefulness_init = 0.5;

    // Approach geometry and phase switching.
    Scalar approach_offset = 6.0;    // target this far from the fish
    Scalar comfort_dist = 12.0;      // fish within this -> comfort dwell
    Scalar close_dist = 6.0;         // fish closer than this pauses the dwell
    Scalar comfort_dwell_s = 2.0;    // dwell needed to enter lead
    Scalar lead_follow_dist = 28.0;  // fish farther than this stalls the lead
    Scalar lead_apart_tolerance_s = 1.0;  // sustained separation ends the lead
    Scalar lead_burst_dist = 15.0;   // waypoint burst length along wall path
    Scalar corner_arrival_dist = 5.0;  // corner reached -> cycle to the next

    // Speed law: commanded speed = factor * speed_unit, capped at max_speed.
    Scalar base_speed_factor = 0.2;
    Scalar speed_unit = 25.0;
    Scalar max_speed = 30.0;
    Scalar lead_speed_factor = 0.8717;

    // Milling in front of the start box before the fish is out.
    Scalar milling_diameter = 20.0;
    Scalar milling_speed = 8.0;
    Scalar milling_door_offset = 15.0;  // circle center this far past the door

    void validate() const {
        if (!(speed_clip_lo < speed_clip_hi))
            throw std::invalid_argument("ControllerParams: speed_clip_lo must be < speed_clip_hi");
        if (!(avoid_baseline >= 0.0 && avoid_baseline <= 1.0))
            throw std::invalid_argument("ControllerParams: avoid_baseline must be in [0,1]");
        for (Scalar d : {interaction_zone, approach_offset, comfort_dist, close_dist,
                         lead_follow_dist, lead_burst_dist, corner_arrival_dist,
                         milling_diameter, milling_door_offset})
            if (!(d > 0.0)) throw std::invalid_argument("ControllerParams: distances must be positive");
        if (std::abs(speed_unit * (1.0 + base_speed_factor) - max_speed) > 1e-9)
            throw std::invalid_argument(
                "ControllerParams: speed_unit * (1 + base_speed_factor) must equal max_speed");
    }
};

/// Follow metric constants (scoring and episode extraction).
struct FollowParams {
    Scalar follow_smoothing = 0.005;
    Scalar follow_gain = 2.0;
    Scalar follow_init = 0.5;
    Scalar episode_threshold = 0.4;
    int episode_min_steps = 200;
    int episode_max_gap_steps = 200;

    void validate() const {
        if (!(episode_threshold > 0.0 && episode_threshold < 1.0))
            throw std::invalid_argument("FollowParams: episode_threshold must be in (0,1)");
        if (episode_min_steps <= 0 || episode_max_gap_steps <= 0)
            throw std::invalid_argument("FollowParams: episode step limits must be positive");
    }
};

/// Turn-then-drive motion plant limits.
struct RobotMotionParams {
    Scalar max_turn_rate = 2.0 * kPi;  // rad/s
    Scalar accel = 60.0;               // cm/s^2
    Scalar decel = 60.0;               // cm/s^2
    Scalar arrival_radius = 1.0;       // cm
    Scalar drive_gate_angle = kPi / 6.0;  // forward motion only when aligned

    void validate() const {
        if (!(max_turn_rate > 0.0 && accel > 0.0 && decel > 0.0 && arrival_radius > 0.0))
            throw std::invalid_argument("RobotMotionParams: limits must be positive");
    }
};

/// Normalized 10-bin histogram of carefulness values over [0, 1].
/// First bin is closed [0, 0.1], the rest are half-open (lo, hi].
struct ReferenceDistribution {
    static constexpr int kBins = 10;
    std::array<Scalar, kBins> frequencies{};

    void validate() const {
        Scalar sum = 0.0;
        for (Scalar f : frequencies) {
            if (f < 0.0) throw std::invalid_argument("ReferenceDistribution: negative frequency");
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("ReferenceDistribution: frequencies must sum to 1");
    }

    static int bin_index(Scalar value) {
        const int idx = static_cast<int>(std::ceil(clamp01(value) * kBins)) - 1;
        return std::clamp(idx, 0, kBins - 1);
    }

    static Scalar bin_center(int idx) { return (idx + 0.5) / kBins; }
    static Scalar bin_lo(int idx) { return static_cast<Scalar>(idx) / kBins; }
    static Scalar bin_hi(int idx) { return static_cast<Scalar>(idx + 1) / kBins; }

    /// Total-variation distance to another normalized histogram.
    Scalar tv_distance(const ReferenceDistribution& other) const {
        Scalar acc = 0.0;
        for (int i = 0; i < kBins; ++i) acc += std::abs(frequencies[i] - other.frequencies[i]);
        return acc / 2.0;
    }
};

/// Carefulness reference distribution measured in competent-mode pretrials.
ReferenceDistribution pretrial_reference_distribution();

/// Bundle serialized to/from the canonical parameter file.
struct ParamSet {
    ControllerParams controller;
    FollowParams follow;
    RobotMotionParams motion;
    ArenaSpec arena;
    TimeBase timebase;

    void validate() const {
        controller.validate();
        follow.validate();
        motion.validate();
        arena.validate();
        timebase.validate();
    }
};

/// JSON round trip for the canonical parameter file. Unknown keys are
/// rejected; missing keys keep their defaults.
std::string params_to_json(const ParamSet& params);
ParamSet params_from_json(const std::string& text);
ParamSet load_params_file(const std::string& path);
void save_params_file(const ParamSet& params, const std::string& path);

/// FNV-1a hash of the canonical JSON form, for manifests.
std::string params_hash(const ParamSet& params);

}  // namespace leadsim
