#include "leadsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "leadsim/detail/csv.hpp"

namespace leadsim {

namespace {

using detail::append_fixed;
using detail::append_int;
using detail::fixed_string;

/// Post-release slice of one record plus its derived per-step series.
struct TrialSeries {
    const TrialRecord* record = nullptr;
    std::size_t begin = 0;                 ///< first post-release row
    std::vector<Scalar> follow_scores;     ///< post-release
    std::vector<std::uint8_t> lead_mask;
    std::vector<FollowEpisode> episodes;   ///< indices into the slice
    std::vector<std::uint8_t> in_episode;  ///< per slice step
};

TrialSeries make_series(const TrialRecord& record, const ParamSet& params) {
    TrialSeries s;
    s.record = &record;
    s.begin = record.post_release_begin();
    const std::size_t n = record.rows.size();
    s.follow_scores.reserve(n - s.begin);
    s.lead_mask.reserve(n - s.begin);
    for (std::size_t k = s.begin; k < n; ++k) {
        s.follow_scores.push_back(record.rows[k].follow_score);
        s.lead_mask.push_back(record.rows[k].phase == Phase::Lead ? 1 : 0);
    }
    s.episodes = extract_follow_episodes(s.follow_scores, s.lead_mask, params.follow);
    s.in_episode.assign(s.follow_scores.size(), 0);
    for (const auto& ep : s.episodes)
        for (std::size_t i = ep.start_step; i < ep.end_step; ++i) s.in_episode[i] = 1;
    return s;
}

std::vector<Scalar> metric_values(const ExperimentResult& result, const std::string& arm,
                                  Scalar (*pick)(const TrialSummary&)) {
    std::vector<Scalar> out;
    for (const auto& e : result.entries)
        if (e.arm == arm) out.push_back(pick(e.summary));
    return out;
}

struct MetricDef {
    const char* name;
    Scalar (*pick)(const TrialSummary&);
};

constexpr MetricDef kMetrics[] = {
    {"approach_count", [](const TrialSummary& s) { return static_cast<Scalar>(s.approach_count); }},
    {"episode_count", [](const TrialSummary& s) { return static_cast<Scalar>(s.episode_count); }},
    {"total_follow_s", [](const TrialSummary& s) { return s.total_follow_s; }},
    {"mean_follow_s", [](const TrialSummary& s) { return s.mean_follow_s; }},
    {"mean_avoidance", [](const TrialSummary& s) { return s.mean_avoidance; }},
    {"mean_carefulness", [](const TrialSummary& s) { return s.mean_carefulness; }},
    {"mean_robot_speed", [](const TrialSummary& s) { return s.mean_robot_speed; }},
    {"mean_fish_speed", [](const TrialSummary& s) { return s.mean_fish_speed; }},
};

/// Records grouped per arm, in trial order.
struct ArmView {
    std::string label;
    std::vector<std::size_t> indices;  ///< into result.entries/records
};

std::pair<ArmView, ArmView> split_arms(const ExperimentResult& result) {
    ArmView a{result.competent_arm, {}};
    ArmView b{result.control_arm, {}};
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        if (result.entries[i].arm == a.label)
            a.indices.push_back(i);
        else
            b.indices.push_back(i);
    }
    return {a, b};
}

}  // namespace

std::vector<MetricTest> outcome_tests(const ExperimentResult& result) {
    std::vector<MetricTest> tests;
    for (const auto& m : kMetrics) {
        const auto x = metric_values(result, result.competent_arm, m.pick);
        const auto y = metric_values(result, result.control_arm, m.pick);
        if (x.empty() || y.empty()) continue;
        tests.push_back({m.name, stats::mann_whitney_u(x, y)});
    }
    return tests;
}

std::string dataset_csv(const ExperimentResult& result) {
    std::string csv =
        "trial,arm,seed,approach_count,episode_count,total_follow_s,mean_follow_s,"
        "mean_avoidance,mean_carefulness,mean_follow_score,mean_robot_speed,mean_fish_speed,"
        "post_release_s\n";
    for (const auto& e : result.entries) {
        append_int(csv, e.index);
        csv += ',';
        csv += e.arm;
        csv += ',';
        append_int(csv, static_cast<std::int64_t>(e.seed));
        csv += ',';
        append_int(csv, e.summary.approach_count);
        csv += ',';
        append_int(csv, e.summary.episode_count);
        csv += ',';
        append_fixed(csv, e.summary.total_follow_s);
        csv += ',';
        append_fixed(csv, e.summary.mean_follow_s);
        csv += ',';
        append_fixed(csv, e.summary.mean_avoidance);
        csv += ',';
        append_fixed(csv, e.summary.mean_carefulness);
        csv += ',';
        append_fixed(csv, e.summary.mean_follow_score);
        csv += ',';
        append_fixed(csv, e.summary.mean_robot_speed);
        csv += ',';
        append_fixed(csv, e.summary.mean_fish_speed);
        csv += ',';
        append_fixed(csv, e.summary.post_release_s);
        csv += '\n';
    }
    return csv;
}

std::vector<ScoreState> recompute_scores(const TrialRecord& record, const ParamSet& params) {
    const ControllerParams& cp = params.controller;
    const FollowParams& fp = params.follow;
    const Scalar dt = Scalar(1) / record.manifest.rate_hz;

    std::vector<ScoreState> out(record.rows.size());
    ScoreState scores;
    for (std::size_t k = 0; k < record.rows.size(); ++k) {
        if (record.rows[k].phase != Phase::Milling) {
            Scalar d = 0;
            bool in_zone = true;
            if (k >= 2) {
                const Vec2& robot_ref = record.rows[k - 2].robot;
                const Vec2& fish_prev = record.rows[k - 2].fish;
                const Vec2& fish_cur = record.rows[k - 1].fish;
                if ((robot_ref - fish_prev).norm() > Scalar(0))
                    d = approach_distance(robot_ref, fish_prev, fish_cur, dt);
                in_zone = (record.rows[k - 1].fish - record.rows[k - 1].robot).norm() <=
                          cp.interaction_zone;
            } else if (k == 1) {
                in_zone =
                    (record.rows[0].fish - record.rows[0].robot).norm() <= cp.interaction_zone;
            }
            scores.update(d, in_zone, cp, fp);
        }
        out[k] = scores;
    }
    return out;
}

AnalysisBundle analyze_experiment(const ExperimentResult& result, const ParamSet& params,
                                  const AnalysisOptions& opts) {
    AnalysisBundle bundle;
    const Scalar dt = params.timebase.dt();
    const auto [arm_a, arm_b] = split_arms(result);

    bundle.files["dataset.csv"] = dataset_csv(result);

    const auto tests = outcome_tests(result);
    {
        std::string csv = "metric,arm1,arm2,n1,n2,u,p,cles,exact,median1,median2\n";
        for (const auto& t : tests) {
            csv += t.metric;
            csv += ',';
            csv += result.competent_arm;
            csv += ',';
            csv += result.control_arm;
            csv += ',';
            append_int(csv, t.test.group1.n);
            csv += ',';
            append_int(csv, t.test.group2.n);
            csv += ',';
            append_fixed(csv, t.test.statistic);
            csv += ',';
            append_fixed(csv, t.test.p_value);
            csv += ',';
            append_fixed(csv, t.test.cles);
            csv += ',';
            csv += t.test.exact ? '1' : '0';
            csv += ',';
            append_fixed(csv, t.test.group1.median);
            csv += ',';
            append_fixed(csv, t.test.group2.median);
            csv += '\n';
        }
        bundle.files["tests.csv"] = csv;
    }

    const bool have_records = result.records.size() == result.entries.size();
    std::vector<TrialSeries> series;
    if (have_records) {
        series.reserve(result.records.size());
        for (const auto& rec : result.records) series.push_back(make_series(rec, params));
    } else {
        bundle.warnings.push_back(
            "per-step records were not kept; only dataset/tests/report are available");
    }

    if (have_records) {
        // Follow score vs inter-agent distance.
        {
            const int nbins =
                static_cast<int>(std::ceil(params.controller.interaction_zone / opts.dist_bin_cm));
            std::string csv = "arm,dist_lo,dist_hi,mean_follow_score,steps\n";
            for (const ArmView* arm : {&arm_a, &arm_b}) {
                std::vector<Scalar> sum(static_cast<std::size_t>(nbins), 0);
                std::vector<std::int64_t> cnt(static_cast<std::size_t>(nbins), 0);
                for (std::size_t idx : arm->indices) {
                    const TrialSeries& s = series[idx];
                    for (std::size_t k = s.begin; k < s.record->rows.size(); ++k) {
                        const TrialRow& row = s.record->rows[k];
                        const Scalar dist = (row.fish - row.robot).norm();
                        if (dist > params.controller.interaction_zone) continue;
                        const int b = std::min(nbins - 1,
                                               static_cast<int>(dist / opts.dist_bin_cm));
                        sum[static_cast<std::size_t>(b)] += row.follow_score;
                        ++cnt[static_cast<std::size_t>(b)];
                    }
                }
                for (int b = 0; b < nbins; ++b) {
                    csv += arm->label;
                    csv += ',';
                    append_fixed(csv, b * opts.dist_bin_cm, 2);
                    csv += ',';
                    append_fixed(csv, (b + 1) * opts.dist_bin_cm, 2);
                    csv += ',';
                    const auto c = cnt[static_cast<std::size_t>(b)];
                    append_fixed(csv, c > 0 ? sum[static_cast<std::size_t>(b)] / static_cast<Scalar>(c) : 0);
                    csv += ',';
                    append_int(csv, c);
                    csv += '\n';
                }
            }
            bundle.files["follow_vs_distance.csv"] = csv;
        }

        // Avoidance score over time since release: per-trial bin means, then
        // across-trial mean and SEM.
        {
            std::string csv = "arm,bin_start_s,bin_end_s,mean,sem,trials\n";
            for (const ArmView* arm : {&arm_a, &arm_b}) {
                std::size_t max_bins = 0;
                std::vector<std::vector<Scalar>> per_bin;  // bin -> per-trial means
                for (std::size_t idx : arm->indices) {
                    const TrialSeries& s = series[idx];
                    std::vector<Scalar> sums;
                    std::vector<std::int64_t> cnts;
                    for (std::size_t i = 0; i < s.follow_scores.size(); ++i) {
                        const std::size_t b = static_cast<std::size_t>(
                            static_cast<Scalar>(i) * dt / opts.time_bin_s);
                        if (b >= sums.size()) {
                            sums.resize(b + 1, 0);
                            cnts.resize(b + 1, 0);
                        }
                        sums[b] += s.record->rows[s.begin + i].avoid_score;
                        ++cnts[b];
                    }
                    max_bins = std::max(max_bins, sums.size());
                    if (per_bin.size() < sums.size()) per_bin.resize(sums.size());
                    for (std::size_t b = 0; b < sums.size(); ++b)
                        if (cnts[b] > 0) per_bin[b].push_back(sums[b] / static_cast<Scalar>(cnts[b]));
                }
                for (std::size_t b = 0; b < max_bins; ++b) {
                    const auto st = stats::describe(per_bin[b]);
                    csv += arm->label;
                    csv += ',';
                    append_fixed(csv, static_cast<Scalar>(b) * opts.time_bin_s, 2);
                    csv += ',';
                    append_fixed(csv, static_cast<Scalar>(b + 1) * opts.time_bin_s, 2);
                    csv += ',';
                    append_fixed(csv, st.mean);
                    csv += ',';
                    append_fixed(csv, st.n > 1 ? st.sd / std::sqrt(static_cast<Scalar>(st.n)) : 0);
                    csv += ',';
                    append_int(csv, st.n);
                    csv += '\n';
                }
            }
            bundle.files["avoidance_over_time.csv"] = csv;
        }

        // Episode list: timing and durations.
        {
            std::string csv = "arm,trial,start_s,duration_s\n";
            for (const ArmView* arm : {&arm_a, &arm_b}) {
                for (std::size_t idx : arm->indices) {
                    const TrialSeries& s = series[idx];
                    for (const auto& ep : s.episodes) {
                        csv += arm->label;
                        csv += ',';
                        append_int(csv, result.entries[idx].index);
                        csv += ',';
                        append_fixed(csv, static_cast<Scalar>(ep.start_step) * dt, 2);
                        csv += ',';
                        append_fixed(csv, ep.duration_s(dt), 2);
                        csv += '\n';
                    }
                }
            }
            bundle.files["episodes.csv"] = csv;
        }

        // Robot speed vs carefulness during Approach.
        {
            std::string csv = "arm,carefulness_lo,carefulness_hi,mean_robot_speed,commanded_speed,steps\n";
            const int nbins = 10;
            for (const ArmView* arm : {&arm_a, &arm_b}) {
                std::vector<Scalar> sum(nbins, 0);
                std::vector<std::int64_t> cnt(nbins, 0);
                for (std::size_t idx : arm->indices) {
                    const TrialSeries& s = series[idx];
                    for (std::size_t k = s.begin; k < s.record->rows.size(); ++k) {
                        const TrialRow& row = s.record->rows[k];
                        if (row.phase != Phase::Approach) continue;
                        const int b = std::min(nbins - 1, static_cast<int>(row.carefulness * nbins));
                        sum[static_cast<std::size_t>(b)] += row.robot_speed;
                        ++cnt[static_cast<std::size_t>(b)];
                    }
                }
                for (int b = 0; b < nbins; ++b) {
                    const Scalar lo = static_cast<Scalar>(b) / nbins;
                    const Scalar hi = static_cast<Scalar>(b + 1) / nbins;
                    const Scalar mid = (lo + hi) / 2;
                    const Scalar commanded = std::min(
                        (Scalar(1) - mid + params.controller.base_speed_factor) *
                            params.controller.speed_unit,
                        params.controller.max_speed);
                    csv += arm->label;
                    csv += ',';
                    append_fixed(csv, lo, 2);
                    csv += ',';
                    append_fixed(csv, hi, 2);
                    csv += ',';
                    const auto c = cnt[static_cast<std::size_t>(b)];
                    append_fixed(csv, c > 0 ? sum[static_cast<std::size_t>(b)] / static_cast<Scalar>(c) : 0);
                    csv += ',';
                    append_fixed(csv, commanded);
                    csv += ',';
                    append_int(csv, c);
                    csv += '\n';
                }
            }
            bundle.files["speed_vs_carefulness.csv"] = csv;
        }

        // Follow yield per approach index.
        {
            std::string csv = "arm,approach_idx,mean_follow_s,trials\n";
            for (const ArmView* arm : {&arm_a, &arm_b}) {
                std::map<int, std::pair<Scalar, int>> acc;  // idx -> (sum, count)
                for (std::size_t idx : arm->indices) {
                    const TrialSeries& s = series[idx];
                    std::map<int, Scalar> per_trial;
                    for (const auto& ep : s.episodes) {
                        const int ai = s.record->rows[s.begin + ep.start_step].approach_idx;
                        per_trial[ai] += ep.duration_s(dt);
                    }
                    for (const auto& [ai, secs] : per_trial) {
                        acc[ai].first += secs;
                        acc[ai].second += 1;
                    }
                }
                for (const auto& [ai, sc] : acc) {
                    csv += arm->label;
                    csv += ',';
                    append_int(csv, ai);
                    csv += ',';
                    append_fixed(csv, sc.first / static_cast<Scalar>(sc.second));
                    csv += ',';
                    append_int(csv, sc.second);
                    csv += '\n';
                }
            }
            bundle.files["follow_by_approach.csv"] = csv;
        }

        // Efficiency: approaches spent before reaching a cumulative follow
        // target. Median over the trials that reach the target.
        {
            std::string csv = "arm,target_s,trials_reaching,fraction_reaching,median_approaches\n";
            for (const ArmView* arm : {&arm_a, &arm_b}) {
                for (Scalar target : opts.efficiency_targets_s) {
                    std::vector<Scalar> approaches;
                    for (std::size_t idx : arm->indices) {
                        const TrialSeries& s = series[idx];
                        Scalar cum = 0;
                        for (std::size_t i = 0; i < s.in_episode.size(); ++i) {
                            if (s.in_episode[i]) cum += dt;
                            if (cum >= target) {
                                approaches.push_back(static_cast<Scalar>(
                                    s.record->rows[s.begin + i].approach_idx));
                                break;
                            }
                        }
                    }
                    const auto st = stats::describe(approaches);
                    csv += arm->label;
                    csv += ',';
                    append_fixed(csv, target, 1);
                    csv += ',';
                    append_int(csv, st.n);
                    csv += ',';
                    append_fixed(csv,
                                 arm->indices.empty()
                                     ? 0
                                     : static_cast<Scalar>(st.n) /
                                           static_cast<Scalar>(arm->indices.size()));
                    csv += ',';
                    append_fixed(csv, st.median, 1);
                    csv += '\n';
                }
            }
            bundle.files["efficiency_curve.csv"] = csv;
        }

        // Mean cumulative toward-robot displacement at 1 Hz.
        {
            std::string csv = "arm,time_s,mean_cum_toward_cm,trials\n";
            const std::int64_t stride = static_cast<std::int64_t>(std::llround(params.timebase.rate));
            for (const ArmView* arm : {&arm_a, &arm_b}) {
                std::vector<Scalar> sums;
                std::vector<int> cnts;
                for (std::size_t idx : arm->indices) {
                    const TrialSeries& s = series[idx];
                    const auto& rows = s.record->rows;
                    Scalar cum = 0;
                    std::int64_t j = 0;
                    for (std::size_t k = s.begin; k < rows.size(); ++k, ++j) {
                        if (k >= 2) {
                            const Vec2& robot_ref = rows[k - 2].robot;
                            const Vec2& fish_prev = rows[k - 2].fish;
                            if ((robot_ref - fish_prev).norm() > Scalar(0))
                                cum += approach_distance(robot_ref, fish_prev, rows[k - 1].fish, dt) * dt;
                        }
                        if (j % stride == 0) {
                            const std::size_t g = static_cast<std::size_t>(j / stride);
                            if (g >= sums.size()) {
                                sums.resize(g + 1, 0);
                                cnts.resize(g + 1, 0);
                            }
                            sums[g] += cum;
                            ++cnts[g];
                        }
                    }
                }
                for (std::size_t g = 0; g < sums.size(); ++g) {
                    csv += arm->label;
                    csv += ',';
                    append_fixed(csv, static_cast<Scalar>(g), 1);
                    csv += ',';
                    append_fixed(csv, cnts[g] > 0 ? sums[g] / static_cast<Scalar>(cnts[g]) : 0);
                    csv += ',';
                    append_int(csv, cnts[g]);
                    csv += '\n';
                }
            }
            bundle.files["cumulative_toward.csv"] = csv;
        }
    }

    // Carefulness-change regression ("accidental competence"): per approach
    // phase, relate the change in mean carefulness since the previous
    // approach to the follow time its lead attempt earned.
    std::string accidental_note;
    if (have_records) {
        std::string csv = "arm,trial,approach_idx,mean_carefulness,delta_carefulness,follow_after_s\n";
        for (const ArmView* arm : {&arm_a, &arm_b}) {
            std::vector<Scalar> deltas, outcomes;
            for (std::size_t idx : arm->indices) {
                const TrialSeries& s = series[idx];
                const auto& rows = s.record->rows;
                std::map<int, std::pair<Scalar, std::int64_t>> care;  // idx -> (sum, steps)
                for (std::size_t k = s.begin; k < rows.size(); ++k)
                    if (rows[k].phase == Phase::Approach) {
                        care[rows[k].approach_idx].first += rows[k].carefulness;
                        care[rows[k].approach_idx].second += 1;
                    }
                std::map<int, Scalar> follow_after;
                for (const auto& ep : s.episodes)
                    follow_after[rows[s.begin + ep.start_step].approach_idx] += ep.duration_s(dt);

                Scalar prev_mean = 0;
                bool has_prev = false;
                for (const auto& [ai, sum_steps] : care) {
                    const Scalar mean_c = sum_steps.first / static_cast<Scalar>(sum_steps.second);
                    if (has_prev) {
                        const Scalar delta = mean_c - prev_mean;
                        const Scalar after = follow_after.count(ai) ? follow_after[ai] : 0;
                        deltas.push_back(delta);
                        outcomes.push_back(after);
                        csv += arm->label;
                        csv += ',';
                        append_int(csv, result.entries[idx].index);
                        csv += ',';
                        append_int(csv, ai);
                        csv += ',';
                        append_fixed(csv, mean_c);
                        csv += ',';
                        append_fixed(csv, delta);
                        csv += ',';
                        append_fixed(csv, after);
                        csv += '\n';
                    }
                    prev_mean = mean_c;
                    has_prev = true;
                }
            }
            try {
                const auto reg = stats::linear_regression(deltas, outcomes);
                accidental_note += "- " + arm->label + ": slope " + fixed_string(reg.slope, 3) +
                                   " s per unit carefulness change, r2 " + fixed_string(reg.r2, 4) +
                                   ", n " + std::to_string(reg.n) + "\n";
            } catch (const std::invalid_argument& e) {
                const std::string msg =
                    "carefulness-change regression unavailable for arm '" + arm->label +
                    "': " + e.what();
                bundle.warnings.push_back(msg);
                accidental_note += "- " + arm->label + ": " + std::string(e.what()) + "\n";
            }
        }
        bundle.files["accidental_competence.csv"] = csv;
    }

    // Markdown report.
    {
        std::string md;
        md += "# Experiment " + std::to_string(result.experiment_id) + ": " +
              result.competent_arm + " vs " + result.control_arm + "\n\n";
        const std::size_t n1 = arm_a.indices.size();
        const std::size_t n2 = arm_b.indices.size();
        md += "- trials: " + std::to_string(n1) + " " + result.competent_arm + ", " +
              std::to_string(n2) + " " + result.control_arm + "\n";
        std::size_t warned = 0;
        for (const auto& rec : result.records) warned += rec.manifest.warnings.empty() ? 0 : 1;
        if (!result.records.empty())
            md += "- trials with warnings: " + std::to_string(warned) + "\n";
        md += "\n## Outcome comparisons (Mann-Whitney U, two-sided)\n\n";
        md += "| metric | " + result.competent_arm + " median [min, max] | " + result.control_arm +
              " median [min, max] | U | p | CLES |\n";
        md += "|---|---|---|---|---|---|\n";
        for (const auto& t : tests) {
            md += "| " + t.metric + " | " + fixed_string(t.test.group1.median, 3) + " [" +
                  fixed_string(t.test.group1.min, 3) + ", " + fixed_string(t.test.group1.max, 3) +
                  "] | " + fixed_string(t.test.group2.median, 3) + " [" +
                  fixed_string(t.test.group2.min, 3) + ", " + fixed_string(t.test.group2.max, 3) +
                  "] | " + fixed_string(t.test.statistic, 1) + " | " +
                  fixed_string(t.test.p_value, 4) + (t.test.exact ? " (exact)" : "") + " | " +
                  fixed_string(t.test.cles, 3) + " |\n";
        }
        if (!accidental_note.empty()) {
            md += "\n## Follow time gained per carefulness change\n\n";
            md += accidental_note;
        }
        if (!bundle.warnings.empty()) {
            md += "\n## Warnings\n\n";
            for (const auto& w : bundle.warnings) md += "- " + w + "\n";
        }
        bundle.files["report.md"] = md;
    }

    return bundle;
}

void write_bundle(const AnalysisBundle& bundle, const std::string& outdir) {
    std::filesystem::create_directories(outdir);
    for (const auto& [name, contents] : bundle.files) {
        const auto path = std::filesystem::path(outdir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write analysis file '" + path.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

}  // namespace leadsim
