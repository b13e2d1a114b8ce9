#include "leadsim/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "leadsim/kinematics.hpp"
#include "leadsim/metrics.hpp"

namespace leadsim {

void TrialProtocol::validate() const {
    if (duration_s <= 0) throw std::invalid_argument("protocol: duration_s must be > 0");
    if (exit_timeout_s < 0) throw std::invalid_argument("protocol: exit_timeout_s must be >= 0");
    if (release_margin < 0) throw std::invalid_argument("protocol: release_margin must be >= 0");
}

nlohmann::json TrialProtocol::to_json() const {
    return {{"duration_s", duration_s},
            {"exit_timeout_s", exit_timeout_s},
            {"release_margin", release_margin}};
}

nlohmann::json FishSpec::to_json() const {
    nlohmann::json j;
    switch (kind) {
        case Kind::Guppy: {
            j["kind"] = "guppy";
            j["population"] = population_to_json(population);
            if (personality) {
                j["personality"] = {{"boldness", personality->boldness},
                                    {"startle_gain", personality->startle_gain},
                                    {"preferred_dist", personality->preferred_dist},
                                    {"cruise_speed", personality->cruise_speed},
                                    {"burst_speed", personality->burst_speed},
                                    {"social_range", personality->social_range},
                                    {"follow_tendency", personality->follow_tendency}};
            }
            break;
        }
        case Kind::Scripted:
            j["kind"] = "scripted";
            j["speed"] = scripted_speed;
            j["waypoint_count"] = waypoints.size();
            break;
        case Kind::Replay:
            j["kind"] = "replay";
            j["track_steps"] = replay_track.size();
            break;
    }
    return j;
}

nlohmann::json TrialConfig::to_json() const {
    return {{"mode", mode_name(mode.kind)},
            {"fixed_value", mode.fixed_value},
            {"law", law_name(law)},
            {"seed", seed},
            {"protocol", protocol.to_json()},
            {"fish", fish.to_json()},
            {"params", nlohmann::json::parse(params_to_json(params))}};
}

LocalControllerDriver::LocalControllerDriver(const ModeConfig& mode, UpdateLaw law,
                                             const ParamSet& params, std::uint64_t rng_seed)
    : mode_(mode), law_(law), params_(params), rng_(rng_seed) {
    state_.carefulness = params_.controller.carefulness_init;
}

ControlFrame LocalControllerDriver::step(const Observation& obs, Scalar dt) {
    ControlFrame frame;
    frame.command = controller_step(state_, obs, dt, mode_, law_, params_.controller,
                                    params_.follow, params_.arena, rng_);
    frame.phase = state_.phase;
    frame.carefulness = state_.carefulness;
    frame.avoid_score = state_.scores.avoid;
    frame.follow_score = state_.scores.follow;
    frame.approach_index = state_.approach_index;
    return frame;
}

std::unique_ptr<FishModel> make_fish(const TrialConfig& config, GuppyPersonality* sampled_out) {
    const ArenaSpec& arena = config.params.arena;
    const Pose spawn(arena.startbox_spawn(), kPi / 2);
    switch (config.fish.kind) {
        case FishSpec::Kind::Guppy: {
            GuppyPersonality personality;
            if (config.fish.personality) {
                personality = *config.fish.personality;
            } else {
                Rng prng(Rng::derive_seed(config.seed, StreamKeys::kPersonality));
                personality = sample_personality(config.fish.population, prng);
            }
            if (sampled_out) *sampled_out = personality;
            return std::make_unique<GuppyFish>(personality, config.fish.population.model, arena,
                                               spawn);
        }
        case FishSpec::Kind::Scripted:
            return std::make_unique<ScriptedFish>(config.fish.waypoints, config.fish.scripted_speed,
                                                  arena, spawn);
        case FishSpec::Kind::Replay:
            return std::make_unique<ReplayFish>(config.fish.replay_track);
    }
    throw std::logic_error("make_fish: unhandled fish kind");
}

TrialRecord run_trial(const TrialConfig& config) {
    LocalControllerDriver driver(config.mode, config.law, config.params,
                                 Rng::derive_seed(config.seed, StreamKeys::kController));
    return run_trial(config, driver);
}

TrialRecord run_trial(const TrialConfig& config, ControllerDriver& driver) {
    config.params.validate();
    config.protocol.validate();

    const ArenaSpec& arena = config.params.arena;
    const ControllerParams& cp = config.params.controller;
    const RobotMotionParams& mp = config.params.motion;
    const Scalar dt = config.params.timebase.dt();

    Rng fish_rng(Rng::derive_seed(config.seed, StreamKeys::kFish));
    auto fish = make_fish(config);

    // Robot starts on the milling circle, tangent heading, at rest.
    const Vec2 mill0 = milling_target(0, cp, arena);
    Pose robot(mill0, kPi / 2);
    Scalar robot_speed = 0;

    TrialRecord record;
    record.manifest.seed = config.seed;
    record.manifest.params_hash = params_hash(config.params);
    record.manifest.rate_hz = config.params.timebase.rate;
    record.manifest.config = config.to_json();

    const std::int64_t needed =
        config.params.timebase.steps_for(config.protocol.duration_s);
    record.rows.reserve(static_cast<std::size_t>(needed) + 512);

    bool released = false;
    std::int64_t release_step = -1;
    Vec2 prev_fish = fish->pose().position;
    std::int64_t post_rows = 0;

    for (std::int64_t k = 0; post_rows < needed; ++k) {
        const Scalar t = static_cast<Scalar>(k) * dt;
        if (!released) {
            const bool out = arena.past_release_plane(fish->pose().position,
                                                      config.protocol.release_margin);
            const bool timed_out = t >= config.protocol.exit_timeout_s - Scalar(1e-9);
            if (out || timed_out) {
                released = true;
                release_step = k;
                if (!out)
                    record.manifest.warnings.push_back(
                        "fish did not leave the start box; released by timeout at " +
                        std::to_string(t) + " s");
            }
        }

        Observation obs;
        obs.robot = robot;
        obs.fish = fish->pose();
        obs.fish_prev = prev_fish;
        obs.fish_released = released;
        const ControlFrame frame = driver.step(obs, dt);

        WorldView world;
        world.robot = robot;
        world.robot_speed = robot_speed;
        world.robot_phase = frame.phase;
        world.fish_released = released;
        world.time_s = t;

        prev_fish = fish->pose().position;
        const bool alive = fish->step(world, dt, fish_rng);

        const RobotStep rs = advance_robot(robot, robot_speed, frame.command, dt, mp, cp, arena);
        robot = rs.pose;
        robot_speed = rs.speed;

        TrialRow row;
        row.step = k;
        row.time_s = t;
        row.fish = fish->pose().position;
        row.robot = robot.position;
        row.phase = frame.phase;
        row.carefulness = frame.carefulness;
        row.avoid_score = frame.avoid_score;
        row.follow_score = frame.follow_score;
        row.robot_speed = robot_speed;
        row.fish_speed = fish->speed();
        row.approach_idx = frame.approach_index;
        record.rows.push_back(row);
        if (released) ++post_rows;

        if (!alive) {
            record.manifest.warnings.push_back("fish track exhausted at step " +
                                               std::to_string(k) + "; trial ended early");
            break;
        }
    }

    record.manifest.pre_release_steps = release_step >= 0
                                            ? release_step
                                            : static_cast<std::int64_t>(record.rows.size());
    return record;
}

PretrialResult run_pretrials(const TrialConfig& base, int n_trials) {
    if (n_trials <= 0) throw std::invalid_argument("run_pretrials: n_trials must be > 0");
    PretrialResult res;
    res.n_trials = n_trials;
    for (int i = 0; i < n_trials; ++i) {
        TrialConfig cfg = base;
        cfg.mode.kind = ModeKind::Competent;
        cfg.seed = Rng::derive_seed(base.seed, 0x9000 + static_cast<std::uint64_t>(i));
        const TrialRecord record = run_trial(cfg);
        for (std::size_t r = record.post_release_begin(); r < record.rows.size(); ++r) {
            const std::size_t bin = res.distribution.bin_index(record.rows[r].carefulness);
            ++res.counts[bin];
            ++res.total_samples;
        }
    }
    if (res.total_samples > 0)
        for (std::size_t b = 0; b < res.counts.size(); ++b)
            res.distribution.frequencies[b] =
                static_cast<Scalar>(res.counts[b]) / static_cast<Scalar>(res.total_samples);
    return res;
}

ModeConfig control_mode_for(int experiment_id, const ModeConfig& base) {
    ModeConfig mode = base;
    switch (experiment_id) {
        case 1: mode.kind = ModeKind::Fixed; break;
        case 2: mode.kind = ModeKind::Random; break;
        case 3: mode.kind = ModeKind::Inverse; break;
        default:
            throw std::invalid_argument("experiment id must be 1, 2, or 3");
    }
    return mode;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.n_per_arm <= 0)
        throw std::invalid_argument("run_experiment: n_per_arm must be > 0");
    const ModeConfig control = control_mode_for(config.id, config.base.mode);
    ModeConfig competent = config.base.mode;
    competent.kind = ModeKind::Competent;

    ExperimentResult result;
    result.experiment_id = config.id;
    result.competent_arm = mode_name(competent.kind);
    result.control_arm = mode_name(control.kind);

    const int total = 2 * config.n_per_arm;
    result.entries.resize(static_cast<std::size_t>(total));
    result.records.resize(config.keep_records ? static_cast<std::size_t>(total) : 0);

    std::filesystem::path trial_dir;
    if (!config.outdir.empty()) {
        trial_dir = std::filesystem::path(config.outdir) / "trials";
        std::filesystem::create_directories(trial_dir);
    }

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (!failed.load()) {
            const int i = next.fetch_add(1);
            if (i >= total) break;
            try {
                const bool is_competent = (i % 2) == 0;
                TrialConfig cfg = config.base;
                cfg.mode = is_competent ? competent : control;
                cfg.seed = Rng::derive_seed(config.seed, static_cast<std::uint64_t>(i));
                TrialRecord record = run_trial(cfg);

                TrialEntry entry;
                entry.index = i;
                entry.arm = is_competent ? result.competent_arm : result.control_arm;
                entry.seed = cfg.seed;
                entry.summary = trial_summary(record, config.base.params);
                result.entries[static_cast<std::size_t>(i)] = entry;

                if (!trial_dir.empty()) {
                    char name[64];
                    std::snprintf(name, sizeof(name), "trial_%03d_%s.csv", i, entry.arm.c_str());
                    write_record(record, (trial_dir / name).string());
                }
                if (config.keep_records)
                    result.records[static_cast<std::size_t>(i)] = std::move(record);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                failed.store(true);
                if (error_message.empty()) error_message = e.what();
            }
        }
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }
    if (failed.load()) throw std::runtime_error("run_experiment: trial failed: " + error_message);
    return result;
}

}  // namespace leadsim
