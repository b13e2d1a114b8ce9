#include "leadsim/fish.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "leadsim/kinematics.hpp"

namespace leadsim {

void GuppyPersonality::validate() const {
    if (boldness < 0 || boldness > 1)
        throw std::invalid_argument("personality: boldness must be in [0, 1]");
    if (follow_tendency < 0 || follow_tendency > 1)
        throw std::invalid_argument("personality: follow_tendency must be in [0, 1]");
    if (startle_gain < 0) throw std::invalid_argument("personality: startle_gain must be >= 0");
    if (cruise_speed <= 0 || burst_speed <= 0)
        throw std::invalid_argument("personality: speeds must be > 0");
    if (cruise_speed >= burst_speed)
        throw std::invalid_argument("personality: cruise_speed must be < burst_speed");
    if (burst_speed > 40)
        throw std::invalid_argument("personality: burst_speed must be <= 40 cm/s");
    if (preferred_dist <= 0 || social_range <= preferred_dist)
        throw std::invalid_argument("personality: need 0 < preferred_dist < social_range");
}

void GuppyModelConfig::validate() const {
    if (decision_interval_s <= 0)
        throw std::invalid_argument("guppy model: decision_interval_s must be > 0");
    if (startle_min_s <= 0 || startle_max_s < startle_min_s || startle_mean_s <= 0)
        throw std::invalid_argument("guppy model: bad startle duration bounds");
    if (fear_decay_tau_s <= 0)
        throw std::invalid_argument("guppy model: fear_decay_tau_s must be > 0");
    if (agitation_tau_s <= 0)
        throw std::invalid_argument("guppy model: agitation_tau_s must be > 0");
    if (agitation_gain < 0)
        throw std::invalid_argument("guppy model: agitation_gain must be >= 0");
    if (wary_tau_s <= 0)
        throw std::invalid_argument("guppy model: wary_tau_s must be > 0");
    if (wary_on_startle < 0 || wary_drop_gain < 0)
        throw std::invalid_argument("guppy model: wariness gains must be >= 0");
    if (wary_fear_ref <= 0)
        throw std::invalid_argument("guppy model: wary_fear_ref must be > 0");
    if (wary_engage_damp < 0 || wary_engage_damp > 1)
        throw std::invalid_argument("guppy model: wary_engage_damp must be in [0, 1]");
    if (attraction_gain < 0 || attraction_gain > 1)
        throw std::invalid_argument("guppy model: attraction_gain must be in [0, 1]");
    if (satiate_min_s <= 0 || satiate_max_s < satiate_min_s || satiate_mean_s <= 0)
        throw std::invalid_argument("guppy model: bad satiation duration bounds");
    if (proximity_floor < 0 || proximity_floor > 1)
        throw std::invalid_argument("guppy model: proximity_floor must be in [0, 1]");
    if (follow_speed_frac <= 0 || follow_speed_frac > 1)
        throw std::invalid_argument("guppy model: follow_speed_frac must be in (0, 1]");
    if (speed_jitter_lo <= 0 || speed_jitter_hi < speed_jitter_lo)
        throw std::invalid_argument("guppy model: bad speed jitter bounds");
    if (follow_range_factor < 1)
        throw std::invalid_argument("guppy model: follow_range_factor must be >= 1");
    if (startle_refractory_s < 0)
        throw std::invalid_argument("guppy model: startle_refractory_s must be >= 0");
    if (watch_floor <= 0 || watch_floor > 1)
        throw std::invalid_argument("guppy model: watch_floor must be in (0, 1]");
    if (burst_factor < 1)
        throw std::invalid_argument("guppy model: burst_factor must be >= 1");
    if (retreat_gain < 0 || retreat_max <= 0)
        throw std::invalid_argument("guppy model: retreat_gain must be >= 0 and retreat_max > 0");
    if (fear_pressure_rate < 0)
        throw std::invalid_argument("guppy model: fear_pressure_rate must be >= 0");
}

GuppyFish::GuppyFish(const GuppyPersonality& personality, const GuppyModelConfig& model,
                     const ArenaSpec& arena, const Pose& spawn)
    : personality_(personality), model_(model), arena_(arena), pose_(spawn) {
    personality_.validate();
    model_.validate();
    fear_ = clamp01(model_.fear_init);
    wander_heading_ = spawn.heading;
    decision_accum_s_ = model_.decision_interval_s;  // decide on the first step
}

Scalar GuppyFish::startle_stimulus(const WorldView& world) const {
    const Vec2 to_fish = pose_.position - world.robot.position;
    const Scalar dist = to_fish.norm();
    if (dist <= Scalar(0)) return world.robot_speed;
    const Scalar directness =
        std::max(Scalar(0), heading_vec(world.robot.heading).dot(to_fish / dist));
    const Scalar prox =
        std::clamp((personality_.social_range - dist) / personality_.social_range, Scalar(0),
                   Scalar(1));
    const Scalar weight = model_.proximity_floor + (Scalar(1) - model_.proximity_floor) * prox;
    return world.robot_speed * directness * weight;
}

Scalar GuppyFish::tolerance() const {
    return (model_.startle_floor + model_.startle_span * personality_.boldness) *
           (Scalar(1) - model_.fear_sensitize * fear_);
}

void GuppyFish::decide(const WorldView& world, Rng& rng) {
    if (!world.fish_released) {
        // Inside the start box the robot is out of sight; only the exit
        // drive and wander noise evolve.
        wander_heading_ = wrap_angle(wander_heading_ + rng.normal(0, model_.wander_noise_sd));
        speed_scale_ = rng.uniform(model_.speed_jitter_lo, model_.speed_jitter_hi);
        exit_active_ = rng.bernoulli(
            clamp01(model_.exit_base + model_.exit_bold_gain * personality_.boldness));
        return;
    }

    if (mode_ == GuppyMode::Startled) return;  // committed to the escape burst

    const Vec2 to_robot = world.robot.position - pose_.position;
    const Scalar dist = to_robot.norm();

    // Burst check: pressure spiking well past tolerance can trigger a full
    // escape burst. A fresh flee leaves a refractory window behind
    // (short-term habituation), so one scare costs one fear bump rather
    // than ratcheting every decision. Zero gain means no burst reflex.
    if (refractory_timer_s_ <= Scalar(0) && personality_.startle_gain > Scalar(0) &&
        dist > Scalar(0) && dist <= personality_.social_range &&
        world.robot_speed > Scalar(0.5)) {
        const Scalar margin = startle_stimulus(world) - model_.burst_factor * tolerance();
        const Scalar p = Scalar(1) / (Scalar(1) + std::exp(-personality_.startle_gain * margin));
        if (rng.bernoulli(p)) {
            mode_ = GuppyMode::Startled;
            startle_timer_s_ = std::clamp(rng.exponential(model_.startle_mean_s),
                                         model_.startle_min_s, model_.startle_max_s);
            refractory_timer_s_ = startle_timer_s_ + model_.startle_refractory_s;
            wariness_ = clamp01(wariness_ + model_.wary_on_startle *
                                                clamp01(fear_ / model_.wary_fear_ref));
            fear_ = clamp01(fear_ + model_.fear_on_startle);
            agitation_ = 1;
            ++startle_count_;
            return;
        }
    }

    if (world.robot_phase == Phase::Lead && dist <= personality_.social_range) {
        if (mode_ == GuppyMode::Following) {
            const Scalar drop = model_.follow_drop_base + model_.follow_drop_fear * fear_ +
                                model_.wary_drop_gain * wariness_;
            if (rng.bernoulli(clamp01(drop))) {
                mode_ = GuppyMode::Calm;
                satiation_timer_s_ = std::clamp(rng.exponential(model_.satiate_mean_s),
                                                model_.satiate_min_s, model_.satiate_max_s);
            }
        } else if (satiation_timer_s_ <= Scalar(0)) {
            const Scalar engage = personality_.follow_tendency *
                                  std::max(Scalar(0), Scalar(1) - model_.follow_fear_damp * fear_) *
                                  (Scalar(1) - agitation_) *
                                  (Scalar(1) - model_.wary_engage_damp * wariness_);
            if (rng.bernoulli(clamp01(engage))) {
                mode_ = GuppyMode::Following;
                return;
            }
        }
    }

    wander_heading_ = wrap_angle(wander_heading_ + rng.normal(0, model_.wander_noise_sd));
    speed_scale_ = rng.uniform(model_.speed_jitter_lo, model_.speed_jitter_hi);
}

bool GuppyFish::step(const WorldView& world, Scalar dt, Rng& rng) {
    fear_ *= std::exp(-dt / model_.fear_decay_tau_s);
    agitation_ *= std::exp(-dt / model_.agitation_tau_s);
    wariness_ *= std::exp(-dt / model_.wary_tau_s);
    refractory_timer_s_ = std::max(Scalar(0), refractory_timer_s_ - dt);
    satiation_timer_s_ = std::max(Scalar(0), satiation_timer_s_ - dt);

    const Vec2 to_robot = world.robot.position - pose_.position;
    const Scalar dist = to_robot.norm();

    // Perceived approach pressure and the excess over personal tolerance.
    // Sustained excess is what grinds fear up, burst or no burst.
    const Scalar pressure = (world.fish_released && dist > Scalar(0) &&
                             dist <= personality_.social_range &&
                             world.robot_speed > Scalar(0.5))
                                ? startle_stimulus(world)
                                : Scalar(0);
    const Scalar over = std::max(Scalar(0), pressure - tolerance());
    if (mode_ != GuppyMode::Startled && over > Scalar(0)) {
        fear_ = clamp01(fear_ + model_.fear_pressure_rate * over * dt);
        agitation_ = clamp01(agitation_ + model_.agitation_gain * over * dt);
    }

    if (mode_ == GuppyMode::Startled) {
        startle_timer_s_ -= dt;
        if (startle_timer_s_ <= 0) mode_ = GuppyMode::Calm;
    }
    if (mode_ == GuppyMode::Following &&
        (world.robot_phase != Phase::Lead ||
         dist > personality_.social_range * model_.follow_range_factor))
        mode_ = GuppyMode::Calm;

    decision_accum_s_ += dt;
    if (decision_accum_s_ >= model_.decision_interval_s) {
        decision_accum_s_ -= model_.decision_interval_s;
        decide(world, rng);
    }

    Vec2 dir = heading_vec(wander_heading_);
    Scalar speed = personality_.cruise_speed * speed_scale_;

    if (!world.fish_released) {
        // Inside the start box: push for the door when the exit drive is
        // on, otherwise dawdle.
        const Vec2 exit_point =
            arena_.door_center() + Scalar(6) * arena_.door_normal();
        if (exit_active_) {
            const Vec2 d = exit_point - pose_.position;
            if (d.norm() > Scalar(1e-9)) dir = d.normalized();
            speed = personality_.cruise_speed * speed_scale_;
        } else {
            speed = personality_.cruise_speed * model_.exit_dawdle_frac;
        }
    } else {
        switch (mode_) {
            case GuppyMode::Startled:
                if (dist > Scalar(0)) dir = -to_robot / dist;
                speed = personality_.burst_speed;
                break;
            case GuppyMode::Following: {
                if (dist > Scalar(0)) dir = to_robot / dist;
                speed = std::clamp(model_.catchup_gain * (dist - model_.follow_gap),
                                   model_.follow_min_speed,
                                   model_.follow_speed_frac * personality_.burst_speed);
                break;
            }
            case GuppyMode::Calm: {
                if (over > Scalar(0)) {
                    // Back away in proportion to how pushy the approach is.
                    dir = -to_robot / dist;
                    speed = std::min(model_.retreat_gain * over, model_.retreat_max);
                } else if (satiation_timer_s_ <= Scalar(0) && dist > Scalar(0) &&
                           dist <= personality_.social_range) {
                    const Scalar span = personality_.social_range - personality_.preferred_dist;
                    const Scalar d_frac =
                        std::clamp((dist - personality_.preferred_dist) / span, Scalar(0), Scalar(1));
                    const Scalar attr =
                        clamp01(model_.attraction_gain * personality_.follow_tendency *
                                (Scalar(1) - model_.attraction_fear_damp * fear_) * d_frac);
                    const Vec2 blend = attr * (to_robot / dist) + (Scalar(1) - attr) * dir;
                    if (blend.norm() > Scalar(1e-9)) dir = blend.normalized();
                    // Watchful slowdown: a fish near the robot holds station
                    // and observes instead of cruising past it.
                    const Scalar watch = model_.watch_floor +
                                         (Scalar(1) - model_.watch_floor) *
                                             std::clamp(dist / personality_.social_range,
                                                        Scalar(0), Scalar(1));
                    speed *= watch;
                }
                break;
            }
        }
    }

    const Vec2 before = pose_.position;
    const Vec2 after = advance_point(before, speed * dir, dt, arena_, WallMode::Reflect);
    const Vec2 moved = after - before;
    Scalar heading = pose_.heading;
    if (moved.norm() > Scalar(1e-9)) {
        heading = std::atan2(moved.y(), moved.x());
        wander_heading_ = heading;  // walls redirect the wander direction too
    }
    pose_ = Pose(after, heading);
    speed_ = moved.norm() / dt;
    return true;
}

ScriptedFish::ScriptedFish(std::vector<Vec2> waypoints, Scalar speed, const ArenaSpec& arena,
                           const Pose& spawn)
    : waypoints_(std::move(waypoints)), cruise_(speed), arena_(arena), pose_(spawn) {
    if (cruise_ < 0) throw std::invalid_argument("scripted fish: speed must be >= 0");
}

bool ScriptedFish::step(const WorldView& world, Scalar dt, Rng& rng) {
    (void)world;
    (void)rng;
    if (waypoints_.empty()) {
        speed_now_ = 0;
        return true;
    }
    const Vec2 target = arena_.clamped(waypoints_[next_]);
    const Vec2 d = target - pose_.position;
    const Scalar dist = d.norm();
    const Scalar reach = cruise_ * dt;
    if (dist <= reach) {
        pose_ = Pose(target, dist > Scalar(1e-9) ? std::atan2(d.y(), d.x()) : pose_.heading);
        speed_now_ = dist / dt;
        next_ = (next_ + 1) % waypoints_.size();
    } else {
        const Vec2 dir = d / dist;
        pose_ = Pose(pose_.position + reach * dir, std::atan2(dir.y(), dir.x()));
        speed_now_ = cruise_;
    }
    return true;
}

ReplayFish::ReplayFish(std::vector<Pose> track) : track_(std::move(track)) {
    if (track_.empty()) throw std::invalid_argument("replay fish: empty track");
    pose_ = track_.front();
}

bool ReplayFish::step(const WorldView& world, Scalar dt, Rng& rng) {
    (void)world;
    (void)rng;
    if (next_ >= track_.size()) return false;
    const Vec2 moved = track_[next_].position - pose_.position;
    speed_now_ = moved.norm() / dt;
    pose_ = track_[next_];
    ++next_;
    return true;
}

Scalar FieldDistribution::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Const: return a;
        case Kind::Uniform: return rng.uniform(a, b);
        case Kind::Normal: return rng.normal(a, b);
    }
    return a;
}

GuppyPersonality sample_personality(const PopulationConfig& pop, Rng& rng) {
    GuppyPersonality p;
    p.boldness = clamp01(pop.boldness.sample(rng));
    p.startle_gain = std::clamp(pop.startle_gain.sample(rng), Scalar(0.05), Scalar(2.0));
    p.preferred_dist = std::clamp(pop.preferred_dist.sample(rng), Scalar(2.0), Scalar(20.0));
    p.cruise_speed = std::clamp(pop.cruise_speed.sample(rng), Scalar(1.0), Scalar(15.0));
    p.burst_speed = std::clamp(pop.burst_speed.sample(rng), Scalar(10.0), Scalar(40.0));
    p.cruise_speed = std::min(p.cruise_speed, Scalar(0.6) * p.burst_speed);
    p.social_range = std::clamp(pop.social_range.sample(rng), Scalar(25.0), Scalar(80.0));
    p.social_range = std::max(p.social_range, p.preferred_dist + Scalar(5.0));
    p.follow_tendency = clamp01(pop.follow_tendency.sample(rng));
    p.validate();
    return p;
}

namespace {

const char* dist_kind_name(FieldDistribution::Kind k) {
    switch (k) {
        case FieldDistribution::Kind::Const: return "const";
        case FieldDistribution::Kind::Uniform: return "uniform";
        case FieldDistribution::Kind::Normal: return "normal";
    }
    return "?";
}

FieldDistribution::Kind dist_kind_from_name(const std::string& name) {
    if (name == "const") return FieldDistribution::Kind::Const;
    if (name == "uniform") return FieldDistribution::Kind::Uniform;
    if (name == "normal") return FieldDistribution::Kind::Normal;
    throw std::invalid_argument("unknown distribution kind '" + name + "'");
}

nlohmann::json dist_to_json(const FieldDistribution& d) {
    return {{"kind", dist_kind_name(d.kind)}, {"a", d.a}, {"b", d.b}};
}

FieldDistribution dist_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_object())
        throw std::invalid_argument("population: field '" + field + "' must be an object");
    FieldDistribution d;
    d.kind = dist_kind_from_name(j.at("kind").get<std::string>());
    d.a = j.at("a").get<Scalar>();
    d.b = j.value("b", Scalar(0));
    if (d.kind == FieldDistribution::Kind::Uniform && d.b < d.a)
        throw std::invalid_argument("population: field '" + field + "' has high < low");
    if (d.kind == FieldDistribution::Kind::Normal && d.b < 0)
        throw std::invalid_argument("population: field '" + field + "' has sd < 0");
    return d;
}

struct PersonalityField {
    const char* name;
    FieldDistribution PopulationConfig::* member;
};

constexpr PersonalityField kPersonalityFields[] = {
    {"boldness", &PopulationConfig::boldness},
    {"startle_gain", &PopulationConfig::startle_gain},
    {"preferred_dist", &PopulationConfig::preferred_dist},
    {"cruise_speed", &PopulationConfig::cruise_speed},
    {"burst_speed", &PopulationConfig::burst_speed},
    {"social_range", &PopulationConfig::social_range},
    {"follow_tendency", &PopulationConfig::follow_tendency},
};

struct ModelField {
    const char* name;
    Scalar GuppyModelConfig::* member;
};

constexpr ModelField kModelFields[] = {
    {"decision_interval_s", &GuppyModelConfig::decision_interval_s},
    {"startle_floor", &GuppyModelConfig::startle_floor},
    {"startle_span", &GuppyModelConfig::startle_span},
    {"proximity_floor", &GuppyModelConfig::proximity_floor},
    {"burst_factor", &GuppyModelConfig::burst_factor},
    {"retreat_gain", &GuppyModelConfig::retreat_gain},
    {"retreat_max", &GuppyModelConfig::retreat_max},
    {"startle_mean_s", &GuppyModelConfig::startle_mean_s},
    {"startle_min_s", &GuppyModelConfig::startle_min_s},
    {"startle_max_s", &GuppyModelConfig::startle_max_s},
    {"startle_refractory_s", &GuppyModelConfig::startle_refractory_s},
    {"fear_init", &GuppyModelConfig::fear_init},
    {"fear_on_startle", &GuppyModelConfig::fear_on_startle},
    {"fear_pressure_rate", &GuppyModelConfig::fear_pressure_rate},
    {"fear_decay_tau_s", &GuppyModelConfig::fear_decay_tau_s},
    {"agitation_tau_s", &GuppyModelConfig::agitation_tau_s},
    {"agitation_gain", &GuppyModelConfig::agitation_gain},
    {"wary_on_startle", &GuppyModelConfig::wary_on_startle},
    {"wary_fear_ref", &GuppyModelConfig::wary_fear_ref},
    {"wary_tau_s", &GuppyModelConfig::wary_tau_s},
    {"wary_engage_damp", &GuppyModelConfig::wary_engage_damp},
    {"wary_drop_gain", &GuppyModelConfig::wary_drop_gain},
    {"fear_sensitize", &GuppyModelConfig::fear_sensitize},
    {"attraction_gain", &GuppyModelConfig::attraction_gain},
    {"attraction_fear_damp", &GuppyModelConfig::attraction_fear_damp},
    {"follow_fear_damp", &GuppyModelConfig::follow_fear_damp},
    {"follow_gap", &GuppyModelConfig::follow_gap},
    {"catchup_gain", &GuppyModelConfig::catchup_gain},
    {"follow_speed_frac", &GuppyModelConfig::follow_speed_frac},
    {"follow_min_speed", &GuppyModelConfig::follow_min_speed},
    {"follow_drop_base", &GuppyModelConfig::follow_drop_base},
    {"follow_drop_fear", &GuppyModelConfig::follow_drop_fear},
    {"follow_range_factor", &GuppyModelConfig::follow_range_factor},
    {"satiate_mean_s", &GuppyModelConfig::satiate_mean_s},
    {"satiate_min_s", &GuppyModelConfig::satiate_min_s},
    {"satiate_max_s", &GuppyModelConfig::satiate_max_s},
    {"wander_noise_sd", &GuppyModelConfig::wander_noise_sd},
    {"speed_jitter_lo", &GuppyModelConfig::speed_jitter_lo},
    {"speed_jitter_hi", &GuppyModelConfig::speed_jitter_hi},
    {"watch_floor", &GuppyModelConfig::watch_floor},
    {"exit_base", &GuppyModelConfig::exit_base},
    {"exit_bold_gain", &GuppyModelConfig::exit_bold_gain},
    {"exit_dawdle_frac", &GuppyModelConfig::exit_dawdle_frac},
};

}  // namespace

nlohmann::json population_to_json(const PopulationConfig& pop) {
    nlohmann::json personality;
    for (const auto& f : kPersonalityFields) personality[f.name] = dist_to_json(pop.*(f.member));
    nlohmann::json model;
    for (const auto& f : kModelFields) model[f.name] = pop.model.*(f.member);
    return {{"personality", personality}, {"model", model}};
}

PopulationConfig population_from_json(const nlohmann::json& j) {
    PopulationConfig pop;
    if (j.contains("personality")) {
        const auto& pj = j.at("personality");
        for (const auto& [key, value] : pj.items()) {
            bool known = false;
            for (const auto& f : kPersonalityFields) {
                if (key == f.name) {
                    pop.*(f.member) = dist_from_json(value, key);
                    known = true;
                    break;
                }
            }
            if (!known)
                throw std::invalid_argument("population: unknown personality field '" + key + "'");
        }
    }
    if (j.contains("model")) {
        const auto& mj = j.at("model");
        for (const auto& [key, value] : mj.items()) {
            bool known = false;
            for (const auto& f : kModelFields) {
                if (key == f.name) {
                    pop.model.*(f.member) = value.get<Scalar>();
                    known = true;
                    break;
                }
            }
            if (!known) throw std::invalid_argument("population: unknown model field '" + key + "'");
        }
    }
    pop.model.validate();
    return pop;
}

PopulationConfig load_population_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open population file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("population file '" + path + "': " + e.what());
    }
    return population_from_json(j);
}

void save_population_file(const PopulationConfig& pop, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write population file '" + path + "'");
    out << population_to_json(pop).dump(2) << '\n';
}

}  // namespace leadsim
