#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "leadsim/arena.hpp"
#include "leadsim/phase.hpp"
#include "leadsim/rng.hpp"
#include "leadsim/types.hpp"

namespace leadsim {

/// Per-individual traits of a simulated guppy. boldness shifts the startle
/// threshold (bold fish tolerate faster robots); follow_tendency scales both
/// attraction toward the robot and the chance of engaging in following.
struct GuppyPersonality {
    Scalar boldness = 0.5;        ///< in [0, 1]
    Scalar startle_gain = 0.9;    ///< logistic slope per cm/s of stimulus
    Scalar preferred_dist = 8.0;  ///< cm; attraction fades inside this
    Scalar cruise_speed = 6.0;    ///< cm/s relaxed swimming
    Scalar burst_speed = 28.0;    ///< cm/s escape swimming
    Scalar social_range = 45.0;   ///< cm; robot noticed inside this
    Scalar follow_tendency = 0.6; ///< in [0, 1]

    void validate() const;
};

/// Behavior constants shared by all simulated guppies. Defaults are the
/// calibrated values; population files may override them.
struct GuppyModelConfig {
    Scalar decision_interval_s = 0.5;  ///< re-decide stochastic mode switches at this cadence

    // Pressure: the fish perceives the robot's speed projected toward it,
    // weighted by proximity. Pressure above the personal tolerance
    // (startle_floor + startle_span * boldness, shrunk by fear) makes the
    // fish back away at a speed proportional to the excess; pressure far
    // above tolerance triggers a burst flee with probability
    // sigmoid(startle_gain * (pressure - burst_factor * tolerance)).
    Scalar startle_floor = 3.0;    ///< cm/s tolerance at boldness 0
    Scalar startle_span = 6.0;     ///< tolerance gain with boldness
    Scalar proximity_floor = 0.35; ///< pressure weight at the social range edge
    Scalar burst_factor = 3.0;     ///< burst flee when pressure passes this * tolerance
    Scalar retreat_gain = 4.0;     ///< retreat cm/s per cm/s of excess pressure
    Scalar retreat_max = 10.0;     ///< retreat speed cap (bursts go faster)
    Scalar startle_mean_s = 0.8;   ///< mean escape burst duration
    Scalar startle_min_s = 0.3;
    Scalar startle_max_s = 2.5;
    Scalar startle_refractory_s = 3.0;  ///< no re-burst for this long after a flee

    // Fear: slow memory of harassment. Sustained overpressure and burst
    // flees raise it; it decays exponentially. High fear suppresses
    // attraction and following and sensitizes the tolerance.
    Scalar fear_init = 0.1;
    Scalar fear_on_startle = 0.2;       ///< bump per burst flee
    Scalar fear_pressure_rate = 0.01;   ///< per (cm/s of excess pressure) per s
    Scalar fear_decay_tau_s = 45.0;
    Scalar fear_sensitize = 0.3;        ///< tolerance shrink factor at fear 1
    Scalar attraction_gain = 0.5;  ///< scales the pull toward a calm robot
    Scalar attraction_fear_damp = 1.0;
    Scalar follow_fear_damp = 1.5;

    // Agitation: short-lived arousal. A burst flee pins it to 1 and sustained
    // overpressure pumps it up gradually; it relaxes within seconds. An
    // agitated fish will not engage following until it settles, so pushing
    // into a fish right before a lead attempt wastes the recruitment.
    Scalar agitation_tau_s = 5.0;
    Scalar agitation_gain = 0.04;  ///< per (cm/s of excess pressure) per s

    // Wariness: long memory of repeated harassment. Each burst flee adds a
    // bump scaled by how frightened the fish already was (a lone scare of a
    // rested fish barely registers; scaring one that is still afraid from the
    // last flee sensitizes it). Unlike fear, wariness outlasts quiet spells,
    // so a robot that keeps re-startling the same fish finds it ever harder
    // to recruit and keeps losing followers early even once the fish looks
    // calm again.
    Scalar wary_on_startle = 0.08;  ///< full bump per burst flee
    Scalar wary_fear_ref = 0.3;     ///< pre-burst fear giving the full bump
    Scalar wary_tau_s = 300.0;
    Scalar wary_engage_damp = 0.8;  ///< engagement chance shrink at wariness 1
    Scalar wary_drop_gain = 0.12;   ///< extra per-decision drop at wariness 1

    // Following a leading robot.
    Scalar follow_gap = 5.0;          ///< cm kept behind the robot
    Scalar catchup_gain = 1.5;        ///< 1/s speed per cm of excess gap
    Scalar follow_speed_frac = 0.85;  ///< cap as fraction of burst speed
    Scalar follow_min_speed = 2.0;    ///< cm/s while station-keeping
    Scalar follow_drop_base = 0.008;  ///< per-decision drop probability
    Scalar follow_drop_fear = 0.3;    ///< extra drop probability at fear 1
    Scalar follow_range_factor = 1.3; ///< give up beyond social_range * this

    // Satiation: after voluntarily quitting a follow, the fish loses interest
    // in the robot for a while — no attraction and no re-engagement until the
    // timer runs out. Being left behind by the robot does not satiate.
    Scalar satiate_mean_s = 35.0;
    Scalar satiate_min_s = 10.0;
    Scalar satiate_max_s = 90.0;

    // Calm swimming. Near the robot the fish slows down and watches instead
    // of cruising (watch_floor scales speed at zero distance).
    Scalar wander_noise_sd = 0.25;    ///< rad per decision heading diffusion
    Scalar speed_jitter_lo = 0.75;    ///< cruise multiplier draw per decision
    Scalar speed_jitter_hi = 1.1;
    Scalar watch_floor = 0.2;         ///< speed fraction when on top of the robot

    // Start-box exit drive before release.
    Scalar exit_base = 0.35;
    Scalar exit_bold_gain = 0.55;
    Scalar exit_dawdle_frac = 0.2;    ///< cruise fraction while not exiting

    void validate() const;
};

/// What the fish perceives about the world each step.
struct WorldView {
    Pose robot;
    Scalar robot_speed = 0;  ///< cm/s
    Phase robot_phase = Phase::Milling;
    bool fish_released = false;
    Scalar time_s = 0;
};

/// Generic fish trajectory source driven by the simulation loop.
class FishModel {
  public:
    virtual ~FishModel() = default;
    virtual Pose pose() const = 0;
    virtual Scalar speed() const = 0;
    /// Advance one step; false means the trajectory is exhausted.
    virtual bool step(const WorldView& world, Scalar dt, Rng& rng) = 0;
};

enum class GuppyMode { Calm, Startled, Following };

/// Stochastic guppy: backs away from pushy robot motion in proportion to how
/// far the perceived approach pressure exceeds its personal tolerance, burst
/// flees when pressure spikes well past it, is attracted to a calm nearby
/// robot, and may fall in behind a leading robot. A slow fear memory of past
/// harassment modulates all of it.
class GuppyFish final : public FishModel {
  public:
    GuppyFish(const GuppyPersonality& personality, const GuppyModelConfig& model,
              const ArenaSpec& arena, const Pose& spawn);

    Pose pose() const override { return pose_; }
    Scalar speed() const override { return speed_; }
    bool step(const WorldView& world, Scalar dt, Rng& rng) override;

    GuppyMode mode() const { return mode_; }
    Scalar fear() const { return fear_; }
    Scalar agitation() const { return agitation_; }
    Scalar wariness() const { return wariness_; }
    int startle_count() const { return startle_count_; }
    const GuppyPersonality& personality() const { return personality_; }

  private:
    void decide(const WorldView& world, Rng& rng);
    Scalar startle_stimulus(const WorldView& world) const;
    Scalar tolerance() const;

    GuppyPersonality personality_;
    GuppyModelConfig model_;
    ArenaSpec arena_;
    Pose pose_;
    Scalar speed_ = 0;
    GuppyMode mode_ = GuppyMode::Calm;
    Scalar startle_timer_s_ = 0;
    Scalar refractory_timer_s_ = 0;
    Scalar satiation_timer_s_ = 0;
    Scalar fear_ = 0;
    Scalar agitation_ = 0;
    Scalar wariness_ = 0;
    Scalar decision_accum_s_ = 0;
    Scalar wander_heading_ = 0;
    Scalar speed_scale_ = 1;
    bool exit_active_ = false;
    int startle_count_ = 0;
};

/// Fish that swims a fixed waypoint loop (or holds position with a single
/// waypoint), ignoring the robot. Deterministic; for tests.
class ScriptedFish final : public FishModel {
  public:
    ScriptedFish(std::vector<Vec2> waypoints, Scalar speed, const ArenaSpec& arena,
                 const Pose& spawn);

    Pose pose() const override { return pose_; }
    Scalar speed() const override { return speed_now_; }
    bool step(const WorldView& world, Scalar dt, Rng& rng) override;

  private:
    std::vector<Vec2> waypoints_;
    Scalar cruise_;
    ArenaSpec arena_;
    Pose pose_;
    Scalar speed_now_ = 0;
    std::size_t next_ = 0;
};

/// Fish that replays a recorded track, one pose per step; step() returns
/// false past the end.
class ReplayFish final : public FishModel {
  public:
    explicit ReplayFish(std::vector<Pose> track);

    Pose pose() const override { return pose_; }
    Scalar speed() const override { return speed_now_; }
    bool step(const WorldView& world, Scalar dt, Rng& rng) override;

  private:
    std::vector<Pose> track_;
    Pose pose_;
    Scalar speed_now_ = 0;
    std::size_t next_ = 1;
};

/// Distribution spec for one personality field.
struct FieldDistribution {
    enum class Kind { Const, Uniform, Normal } kind = Kind::Const;
    Scalar a = 0;  ///< Const: value; Uniform: low; Normal: mean
    Scalar b = 0;  ///< Uniform: high; Normal: sd

    Scalar sample(Rng& rng) const;
};

/// Population description: one distribution per personality field plus
/// optional behavior-constant overrides.
struct PopulationConfig {
    FieldDistribution boldness{FieldDistribution::Kind::Uniform, 0.1, 0.9};
    FieldDistribution startle_gain{FieldDistribution::Kind::Const, 0.9, 0};
    FieldDistribution preferred_dist{FieldDistribution::Kind::Uniform, 6.0, 10.0};
    FieldDistribution cruise_speed{FieldDistribution::Kind::Uniform, 4.0, 8.0};
    FieldDistribution burst_speed{FieldDistribution::Kind::Uniform, 24.0, 34.0};
    FieldDistribution social_range{FieldDistribution::Kind::Uniform, 40.0, 50.0};
    FieldDistribution follow_tendency{FieldDistribution::Kind::Uniform, 0.45, 0.95};
    GuppyModelConfig model;
};

/// Draw one personality; fields are sampled in declaration order and
/// clamped to valid ranges.
GuppyPersonality sample_personality(const PopulationConfig& pop, Rng& rng);

nlohmann::json population_to_json(const PopulationConfig& pop);
PopulationConfig population_from_json(const nlohmann::json& j);
PopulationConfig load_population_file(const std::string& path);
void save_population_file(const PopulationConfig& pop, const std::string& path);

}  // namespace leadsim
