#include "leadsim/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "leadsim/record.hpp"

namespace leadsim {

Scalar approach_distance(const Vec2& robot_prev, const Vec2& fish_prev,
                         const Vec2& fish_cur, Scalar dt) {
    if (dt <= 0)
        throw std::invalid_argument("approach_distance: dt must be positive");
    const Vec2 to_robot = robot_prev - fish_prev;
    const Scalar dist = to_robot.norm();
    if (dist <= Scalar(0))
        throw DegenerateGeometry("approach_distance: robot and fish coincide");
    const Vec2 displacement = fish_cur - fish_prev;
    return displacement.dot(to_robot / dist) / dt;
}

Scalar avoidance_event(Scalar approach_dist, const ControllerParams& p) {
    if (approach_dist >= Scalar(0)) return 0;
    return clip_normalize(-approach_dist, p.speed_clip_lo, p.speed_clip_hi);
}

Scalar follow_event(Scalar approach_dist, const ControllerParams& p) {
    if (approach_dist <= Scalar(0)) return 0;
    return clip_normalize(approach_dist, p.speed_clip_lo, p.speed_clip_hi);
}

Scalar update_avoidance_score(Scalar prev, Scalar event, bool in_zone,
                              const ControllerParams& p) {
    const Scalar gate = in_zone ? Scalar(1) : Scalar(0);
    const Scalar next = p.avoid_smoothing * gate * p.avoid_gain * event +
                        (Scalar(1) - p.avoid_smoothing) * prev;
    return clamp01(next);
}

Scalar update_follow_score(Scalar prev, Scalar event, bool in_zone,
                           const FollowParams& fp) {
    const Scalar gate = in_zone ? Scalar(1) : Scalar(0);
    const Scalar floor_boost = Scalar(1) + std::exp(-event / Scalar(3));
    const Scalar next = fp.follow_smoothing * gate * fp.follow_gain * floor_boost * event +
                        (Scalar(1) - fp.follow_smoothing) * prev;
    return clamp01(next);
}

std::vector<FollowEpisode> extract_follow_episodes(const std::vector<Scalar>& follow_scores,
                                                   const std::vector<std::uint8_t>& lead_mask,
                                                   const FollowParams& fp) {
    if (follow_scores.size() != lead_mask.size())
        throw std::invalid_argument("extract_follow_episodes: series length mismatch");

    const std::size_t n = follow_scores.size();

    // Raw runs of consecutive qualifying steps.
    std::vector<FollowEpisode> runs;
    std::size_t i = 0;
    while (i < n) {
        const bool on = lead_mask[i] != 0 && follow_scores[i] > fp.episode_threshold;
        if (!on) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && lead_mask[j] != 0 && follow_scores[j] > fp.episode_threshold) ++j;
        runs.push_back({i, j});
        i = j;
    }

    // Bridge gaps strictly shorter than the gap limit.
    std::vector<FollowEpisode> merged;
    for (const auto& run : runs) {
        if (!merged.empty() && run.start_step - merged.back().end_step <
                                   static_cast<std::size_t>(fp.episode_max_gap_steps)) {
            merged.back().end_step = run.end_step;
        } else {
            merged.push_back(run);
        }
    }

    // Keep only episodes of at least the minimum length.
    std::vector<FollowEpisode> episodes;
    for (const auto& ep : merged)
        if (ep.length() >= static_cast<std::size_t>(fp.episode_min_steps)) episodes.push_back(ep);
    return episodes;
}

TrialSummary trial_summary(const TrialRecord& record, const ParamSet& params) {
    const std::size_t begin = record.post_release_begin();
    const std::size_t n = record.rows.size();
    if (begin >= n)
        throw std::invalid_argument("trial_summary: record has no post-release rows");

    const Scalar dt = params.timebase.dt();

    TrialSummary s;
    std::vector<Scalar> follow_scores;
    std::vector<std::uint8_t> lead_mask;
    follow_scores.reserve(n - begin);
    lead_mask.reserve(n - begin);

    Phase prev_phase = Phase::Milling;
    Scalar sum_avoid = 0, sum_care = 0, sum_follow = 0;
    Scalar sum_robot_speed = 0, sum_fish_speed = 0;
    std::size_t approach_steps = 0;

    for (std::size_t k = begin; k < n; ++k) {
        const TrialRow& row = record.rows[k];
        if (row.phase == Phase::Approach && prev_phase != Phase::Approach) ++s.approach_count;
        prev_phase = row.phase;

        follow_scores.push_back(row.follow_score);
        lead_mask.push_back(row.phase == Phase::Lead ? 1 : 0);
        sum_avoid += row.avoid_score;
        sum_care += row.carefulness;
        sum_follow += row.follow_score;
        if (row.phase == Phase::Approach) {
            sum_robot_speed += row.robot_speed;
            sum_fish_speed += row.fish_speed;
            ++approach_steps;
        }
    }

    const Scalar steps = static_cast<Scalar>(n - begin);
    s.mean_avoidance = sum_avoid / steps;
    s.mean_carefulness = sum_care / steps;
    s.mean_follow_score = sum_follow / steps;
    s.post_release_s = steps * dt;
    if (approach_steps > 0) {
        s.mean_robot_speed = sum_robot_speed / static_cast<Scalar>(approach_steps);
        s.mean_fish_speed = sum_fish_speed / static_cast<Scalar>(approach_steps);
    }

    const auto episodes = extract_follow_episodes(follow_scores, lead_mask, params.follow);
    s.episode_count = static_cast<int>(episodes.size());
    for (const auto& ep : episodes) s.total_follow_s += ep.duration_s(dt);
    s.mean_follow_s = episodes.empty() ? Scalar(0) : s.total_follow_s / static_cast<Scalar>(episodes.size());
    return s;
}

}  // namespace leadsim
