#pragma once

#include <map>
#include <string>
#include <vector>

#include "leadsim/metrics.hpp"
#include "leadsim/sim.hpp"
#include "leadsim/stats.hpp"

namespace leadsim {

struct AnalysisOptions {
    Scalar time_bin_s = 30;   ///< avoidance-over-time bin width
    Scalar dist_bin_cm = 4;   ///< follow-vs-distance bin width
    /// Cumulative-follow targets for the efficiency curve (seconds).
    std::vector<Scalar> efficiency_targets_s = {15, 30, 60, 90, 120, 180, 240, 300};
};

/// Everything the analysis produces, as filename -> file contents. Written
/// to disk with write_bundle; kept in memory so tests can inspect it.
struct AnalysisBundle {
    std::map<std::string, std::string> files;
    std::vector<std::string> warnings;
};

/// Per-metric comparison between the experiment arms.
struct MetricTest {
    std::string metric;
    stats::TestResult test;
};

/// Outcome tests for the standard trial metrics (Mann-Whitney U).
std::vector<MetricTest> outcome_tests(const ExperimentResult& result);

/// Per-trial summary table for both arms.
std::string dataset_csv(const ExperimentResult& result);

/// Build the full analysis bundle: dataset, outcome tests, follow-score vs
/// distance, avoidance over time, episode timing/durations, robot speed vs
/// carefulness, per-approach follow yield, efficiency curve, cumulative
/// toward-robot displacement, the carefulness-change regression, and a
/// markdown report. Requires result.records; an experiment run with
/// keep_records = false yields a partial bundle plus warnings.
AnalysisBundle analyze_experiment(const ExperimentResult& result, const ParamSet& params,
                                  const AnalysisOptions& opts = {});

/// Write every bundle file into outdir (created if missing).
void write_bundle(const AnalysisBundle& bundle, const std::string& outdir);

/// Recompute the avoidance/follow score series of a record from positions
/// alone, mirroring the controller's update order. For rows produced by this
/// simulator the result matches the recorded columns exactly; for foreign
/// tracks it derives the scores that the controller would have seen. Scores
/// stay at their initial value while the phase column reads Milling.
std::vector<ScoreState> recompute_scores(const TrialRecord& record, const ParamSet& params);

}  // namespace leadsim
