#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "leadsim/controller.hpp"
#include "leadsim/fish.hpp"
#include "leadsim/params.hpp"
#include "leadsim/record.hpp"

namespace leadsim {

/// Trial timing protocol.
struct TrialProtocol {
    Scalar duration_s = 600;      ///< recorded time after release
    Scalar exit_timeout_s = 180;  ///< force release after this much waiting
    Scalar release_margin = 3.0;  ///< cm past the door plane that counts as out

    void validate() const;
    nlohmann::json to_json() const;
};

/// Which fish drives the trial.
struct FishSpec {
    enum class Kind { Guppy, Scripted, Replay };
    Kind kind = Kind::Guppy;

    PopulationConfig population;                    ///< Guppy: trait distributions
    std::optional<GuppyPersonality> personality;    ///< Guppy: bypass sampling

    std::vector<Vec2> waypoints;                    ///< Scripted: loop (empty = hold)
    Scalar scripted_speed = 6;

    std::vector<Pose> replay_track;                 ///< Replay: one pose per step

    nlohmann::json to_json() const;
};

struct TrialConfig {
    ModeConfig mode;
    UpdateLaw law = UpdateLaw::Integrator;
    std::uint64_t seed = 0;
    TrialProtocol protocol;
    ParamSet params;
    FishSpec fish;

    nlohmann::json to_json() const;
};

/// Controller output for one step, everything the record keeps per row.
struct ControlFrame {
    MotionCommand command;
    Phase phase = Phase::Milling;
    Scalar carefulness = 0;
    Scalar avoid_score = 0;
    Scalar follow_score = 0;
    int approach_index = 0;
};

/// Steps a controller, locally or across a transport. The engine is written
/// against this so an in-process controller and a remote one produce records
/// through the identical code path.
class ControllerDriver {
  public:
    virtual ~ControllerDriver() = default;
    virtual ControlFrame step(const Observation& obs, Scalar dt) = 0;
};

/// In-process controller.
class LocalControllerDriver final : public ControllerDriver {
  public:
    LocalControllerDriver(const ModeConfig& mode, UpdateLaw law, const ParamSet& params,
                          std::uint64_t rng_seed);
    ControlFrame step(const Observation& obs, Scalar dt) override;
    const ControllerState& state() const { return state_; }

  private:
    ModeConfig mode_;
    UpdateLaw law_;
    ParamSet params_;
    ControllerState state_;
    Rng rng_;
};

/// RNG stream keys used by the engine (fixed; part of the record format).
struct StreamKeys {
    static constexpr std::uint64_t kFish = 1;
    static constexpr std::uint64_t kController = 2;
    static constexpr std::uint64_t kPersonality = 3;
};

/// Build the trial's fish model (sampling a personality when needed).
std::unique_ptr<FishModel> make_fish(const TrialConfig& config,
                                     GuppyPersonality* sampled_out = nullptr);

/// Run one closed-loop trial with the standard in-process controller.
TrialRecord run_trial(const TrialConfig& config);

/// Run one closed-loop trial against a caller-supplied controller driver.
TrialRecord run_trial(const TrialConfig& config, ControllerDriver& driver);

/// Carefulness histogram pooled over n adaptive trials.
struct PretrialResult {
    ReferenceDistribution distribution;
    std::array<std::int64_t, ReferenceDistribution::kBins> counts{};
    std::int64_t total_samples = 0;
    int n_trials = 0;
};

/// Run n fully adaptive trials and pool their per-step carefulness into a
/// 10-bin histogram (the reference that Random mode replays).
PretrialResult run_pretrials(const TrialConfig& base, int n_trials);

/// One trial's slot in an experiment.
struct TrialEntry {
    int index = 0;
    std::string arm;
    std::uint64_t seed = 0;
    TrialSummary summary;
};

struct ExperimentResult {
    int experiment_id = 0;
    std::string competent_arm;
    std::string control_arm;
    std::vector<TrialEntry> entries;
    std::vector<TrialRecord> records;  ///< parallel to entries when kept
};

struct ExperimentConfig {
    int id = 1;  ///< 1: vs fixed, 2: vs random, 3: vs inverse
    int n_per_arm = 40;
    std::uint64_t seed = 0;
    TrialConfig base;       ///< mode/seed fields are overridden per trial
    std::string outdir;     ///< when set, per-trial records are written here
    int jobs = 1;
    bool keep_records = true;
};

/// Control-arm mode for an experiment id (1 fixed, 2 random, 3 inverse).
ModeConfig control_mode_for(int experiment_id, const ModeConfig& base);

/// Run a two-arm experiment with alternating treatment assignment.
/// Trial i uses seed derive_seed(seed, i), so results are independent of
/// the job count and reruns are byte-identical.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace leadsim
