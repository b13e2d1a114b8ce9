#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "leadsim/params.hpp"
#include "leadsim/types.hpp"

namespace leadsim {

struct TrialRecord;  // record.hpp

/// Signed rate (cm/s) at which the fish moves toward the robot, measured by
/// projecting the fish displacement over one step onto the unit vector from
/// the fish's previous position to the robot's previous position. Positive
/// means approach, negative means retreat.
///
/// Throws DegenerateGeometry when robot_prev == fish_prev (no direction).
Scalar approach_distance(const Vec2& robot_prev, const Vec2& fish_prev,
                         const Vec2& fish_cur, Scalar dt);

/// Avoidance event strength in [0, 1]: retreat speed clipped to
/// [speed_clip_lo, speed_clip_hi] cm/s and normalized. Zero when the fish is
/// approaching or holding still.
Scalar avoidance_event(Scalar approach_dist, const ControllerParams& p);

/// Follow event strength in [0, 1]: approach speed clipped and normalized
/// symmetrically to avoidance_event. Zero when the fish retreats.
Scalar follow_event(Scalar approach_dist, const ControllerParams& p);

/// One exponential-smoothing update of the avoidance score. Events only
/// count while the fish is inside the interaction zone (in_zone); outside,
/// the score decays. Result clamped to [0, 1].
Scalar update_avoidance_score(Scalar prev, Scalar event, bool in_zone,
                              const ControllerParams& p);

/// One exponential-smoothing update of the follow score. The event term is
/// amplified by a soft floor factor (1 + exp(-event / 3)) so weak-but-real
/// following still charges the score. Result clamped to [0, 1].
Scalar update_follow_score(Scalar prev, Scalar event, bool in_zone,
                           const FollowParams& fp);

/// Avoidance + follow score pair evolved together from one approach-distance
/// sample per step.
struct ScoreState {
    Scalar avoid = 0.5;
    Scalar follow = 0.5;

    void update(Scalar approach_dist, bool in_zone, const ControllerParams& cp,
                const FollowParams& fp) {
        avoid = update_avoidance_score(avoid, avoidance_event(approach_dist, cp), in_zone, cp);
        follow = update_follow_score(follow, follow_event(approach_dist, cp), in_zone, fp);
    }
};

/// Half-open step range [start_step, end_step) during which the fish was
/// scored as following the leading robot.
struct FollowEpisode {
    std::size_t start_step = 0;
    std::size_t end_step = 0;

    std::size_t length() const { return end_step - start_step; }
    Scalar duration_s(Scalar dt) const { return static_cast<Scalar>(length()) * dt; }
};

/// Extract follow episodes from a per-step follow-score series and a
/// per-step lead-phase mask (same length). A step belongs to the raw mask
/// when follow > episode_threshold AND the robot is leading. Gaps strictly
/// shorter than episode_max_gap_steps are bridged, then runs strictly
/// shorter than episode_min_steps are dropped.
///
/// Throws std::invalid_argument when the series lengths differ.
std::vector<FollowEpisode> extract_follow_episodes(const std::vector<Scalar>& follow_scores,
                                                   const std::vector<std::uint8_t>& lead_mask,
                                                   const FollowParams& fp);

/// Per-trial aggregate metrics, computed over the post-release part of a
/// trial record.
struct TrialSummary {
    int approach_count = 0;        ///< number of Approach phase entries
    int episode_count = 0;         ///< follow episodes after bridging/filtering
    Scalar total_follow_s = 0;     ///< summed episode duration
    Scalar mean_follow_s = 0;      ///< mean episode duration (0 when none)
    Scalar mean_avoidance = 0;     ///< mean avoidance score
    Scalar mean_carefulness = 0;   ///< mean carefulness
    Scalar mean_follow_score = 0;  ///< mean follow score
    Scalar mean_robot_speed = 0;   ///< mean robot speed over Approach steps (cm/s)
    Scalar mean_fish_speed = 0;    ///< mean fish speed over Approach steps (cm/s)
    Scalar post_release_s = 0;     ///< analyzed duration
};

/// Summarize one trial record. Only rows at or after release (first
/// non-Milling row) contribute. Throws std::invalid_argument when the record
/// has no post-release rows.
TrialSummary trial_summary(const TrialRecord& record, const ParamSet& params);

}  // namespace leadsim
