#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "leadsim/phase.hpp"
#include "leadsim/types.hpp"

namespace leadsim {

/// One snapshot per simulation step, taken after that step's updates.
struct TrialRow {
    std::int64_t step = 0;
    Scalar time_s = 0;
    Vec2 fish = Vec2::Zero();
    Vec2 robot = Vec2::Zero();
    Phase phase = Phase::Milling;
    Scalar carefulness = 0;
    Scalar avoid_score = 0;
    Scalar follow_score = 0;
    Scalar robot_speed = 0;
    Scalar fish_speed = 0;
    int approach_idx = 0;
};

/// Provenance of a trial record.
struct TrialManifest {
    std::string artifact_version = "0.1.0";
    std::uint64_t seed = 0;
    std::string params_hash;
    Scalar rate_hz = 25;
    std::int64_t pre_release_steps = 0;
    nlohmann::json config;  ///< full trial configuration dump
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
    static TrialManifest from_json(const nlohmann::json& j);
};

struct TrialRecord {
    std::vector<TrialRow> rows;
    TrialManifest manifest;

    /// Index of the first non-Milling row (rows.size() when all milling).
    std::size_t post_release_begin() const;
};

/// Manifest path that goes with a record CSV ("x.csv" -> "x.manifest.json").
std::string manifest_path_for(const std::string& csv_path);

/// Write the per-step table as CSV (6-decimal fixed floats) plus the
/// manifest JSON next to it.
void write_record(const TrialRecord& record, const std::string& csv_path);

/// Read a record CSV. Requires at least the position columns
/// (step, time_s, fish_x, fish_y, robot_x, robot_y); the remaining columns
/// are optional so externally recorded two-agent tracks load too (missing
/// values default to zero, phase to Approach). A differing sample rate is
/// resampled onto `target_rate_hz` by linear interpolation when
/// allow_resample is set, otherwise rejected. Parse errors name the
/// offending line. Loads the manifest when present.
TrialRecord read_record(const std::string& csv_path, Scalar target_rate_hz = 25,
                        bool allow_resample = false);

}  // namespace leadsim
