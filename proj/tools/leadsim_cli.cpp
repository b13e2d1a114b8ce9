// Command-line front end: run trials, pretrials and experiments, analyze
// recorded datasets, recompute metrics for external trajectories, and serve
// the controller over TCP.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "leadsim/analysis.hpp"
#include "leadsim/bridge.hpp"
#include "leadsim/detail/csv.hpp"
#include "leadsim/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string out = ".";
    std::string params_path;
    std::string population_path;
    std::string reference_path;
    std::string mode = "competent";
    std::string law = "integrator";
    double fixed_value = 0.528;
    double duration_s = 600;
    double exit_timeout_s = 180;
    std::uint64_t seed = 0;
};

void add_out_option(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("-o,--out", o.out, "Output directory")
        ->envname("LEADSIM_OUT")
        ->capture_default_str();
}

void add_seed_option(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "Master random seed (required; no wall-clock default)")
        ->required();
}

void add_model_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--params", o.params_path, "Parameter JSON file (defaults built in)");
    cmd->add_option("--population", o.population_path, "Fish population JSON file");
    cmd->add_option("--carefulness-law", o.law, "Carefulness update law")
        ->check(CLI::IsMember({"integrator", "leaky"}))
        ->capture_default_str();
    cmd->add_option("--duration", o.duration_s, "Recorded post-release seconds")
        ->capture_default_str();
    cmd->add_option("--exit-timeout", o.exit_timeout_s, "Start-box exit timeout in seconds")
        ->capture_default_str();
}

void add_mode_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--mode", o.mode, "Controller treatment")
        ->check(CLI::IsMember({"competent", "fixed", "random", "inverse"}))
        ->capture_default_str();
    cmd->add_option("--fixed-value", o.fixed_value, "Carefulness held by fixed mode")
        ->capture_default_str();
    cmd->add_option("--reference", o.reference_path,
                    "Reference distribution JSON for random mode (pretrial output)");
}

leadsim::ReferenceDistribution load_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reference file: " + path);
    json j = json::parse(in);
    leadsim::ReferenceDistribution ref;
    const auto& freqs = j.at("frequencies");
    if (freqs.size() != ref.frequencies.size())
        throw std::runtime_error("reference file needs exactly 10 frequencies");
    for (std::size_t i = 0; i < ref.frequencies.size(); ++i)
        ref.frequencies[i] = freqs[i].get<double>();
    ref.validate();
    return ref;
}

leadsim::TrialConfig build_trial_config(const CommonOpts& o) {
    leadsim::TrialConfig cfg;
    cfg.mode.kind = leadsim::mode_from_name(o.mode);
    cfg.mode.fixed_value = o.fixed_value;
    if (!o.reference_path.empty()) cfg.mode.reference = load_reference(o.reference_path);
    cfg.law = leadsim::law_from_name(o.law);
    cfg.seed = o.seed;
    cfg.protocol.duration_s = o.duration_s;
    cfg.protocol.exit_timeout_s = o.exit_timeout_s;
    cfg.protocol.validate();
    if (!o.params_path.empty()) cfg.params = leadsim::load_params_file(o.params_path);
    cfg.params.validate();
    if (!o.population_path.empty())
        cfg.fish.population = leadsim::load_population_file(o.population_path);
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int cmd_run(const CommonOpts& o) {
    leadsim::TrialConfig cfg = build_trial_config(o);
    leadsim::TrialRecord record = leadsim::run_trial(cfg);

    fs::create_directories(o.out);
    std::string name = "trial_" + o.mode + "_seed" + std::to_string(o.seed) + ".csv";
    fs::path csv_path = fs::path(o.out) / name;
    leadsim::write_record(record, csv_path.string());

    leadsim::TrialSummary summary = leadsim::trial_summary(record, cfg.params);
    std::cout << record.manifest.to_json().dump(2) << "\n";
    std::cerr << "wrote " << csv_path.string() << " (" << record.rows.size() << " rows, "
              << summary.approach_count << " approaches, " << summary.episode_count
              << " follow episodes, " << summary.total_follow_s << " s following)\n";
    for (const auto& w : record.manifest.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int cmd_pretrial(const CommonOpts& o, int n_trials) {
    leadsim::TrialConfig cfg = build_trial_config(o);
    leadsim::PretrialResult pre = leadsim::run_pretrials(cfg, n_trials);

    json j;
    j["frequencies"] = pre.distribution.frequencies;
    j["counts"] = pre.counts;
    j["total_samples"] = pre.total_samples;
    j["n_trials"] = pre.n_trials;
    j["seed"] = o.seed;
    j["params_hash"] = leadsim::params_hash(cfg.params);

    fs::create_directories(o.out);
    fs::path path = fs::path(o.out) / "reference_distribution.json";
    write_text(path, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    std::cerr << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_experiment(const CommonOpts& o, int id, int n_per_arm, int jobs) {
    leadsim::ExperimentConfig ecfg;
    ecfg.id = id;
    ecfg.n_per_arm = n_per_arm;
    ecfg.seed = o.seed;
    ecfg.base = build_trial_config(o);
    ecfg.outdir = o.out;
    ecfg.jobs = jobs;
    ecfg.keep_records = true;

    leadsim::ExperimentResult result = leadsim::run_experiment(ecfg);

    json manifest;
    manifest["experiment_id"] = id;
    manifest["n_per_arm"] = n_per_arm;
    manifest["seed"] = o.seed;
    manifest["competent_arm"] = result.competent_arm;
    manifest["control_arm"] = result.control_arm;
    manifest["base"] = ecfg.base.to_json();
    write_text(fs::path(o.out) / "experiment.json", manifest.dump(2) + "\n");

    leadsim::AnalysisBundle bundle = leadsim::analyze_experiment(result, ecfg.base.params);
    leadsim::write_bundle(bundle, (fs::path(o.out) / "analysis").string());

    std::cout << manifest.dump(2) << "\n";
    auto report = bundle.files.find("report.md");
    if (report != bundle.files.end()) std::cout << report->second;
    for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "wrote " << result.entries.size() << " trials + analysis under " << o.out
              << "\n";
    return 0;
}

// Rebuild an ExperimentResult from a directory previously produced by the
// experiment subcommand (experiment.json + trials/*.csv with manifests).
leadsim::ExperimentResult load_experiment_dir(const std::string& dir,
                                              leadsim::ParamSet& params_out) {
    fs::path root(dir);
    std::ifstream in(root / "experiment.json");
    if (!in) throw std::runtime_error("no experiment.json under " + dir);
    json manifest = json::parse(in);

    leadsim::ExperimentResult result;
    result.experiment_id = manifest.at("experiment_id").get<int>();
    result.competent_arm = manifest.at("competent_arm").get<std::string>();
    result.control_arm = manifest.at("control_arm").get<std::string>();
    params_out = leadsim::params_from_json(manifest.at("base").at("params").dump());

    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(root / "trials"))
        if (entry.path().extension() == ".csv") csvs.push_back(entry.path());
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty()) throw std::runtime_error("no trial CSVs under " + dir + "/trials");

    for (const auto& path : csvs) {
        leadsim::TrialRecord record =
            leadsim::read_record(path.string(), params_out.timebase.rate);
        leadsim::TrialEntry entry;
        entry.index = static_cast<int>(result.entries.size());
        entry.arm = record.manifest.config.value("mode", std::string("competent"));
        entry.seed = record.manifest.seed;
        entry.summary = leadsim::trial_summary(record, params_out);
        result.entries.push_back(entry);
        result.records.push_back(std::move(record));
    }
    return result;
}

int cmd_analyze(const std::string& dataset_dir, std::string out) {
    if (out.empty()) out = dataset_dir;
    leadsim::ParamSet params;
    leadsim::ExperimentResult result = load_experiment_dir(dataset_dir, params);
    leadsim::AnalysisBundle bundle = leadsim::analyze_experiment(result, params);
    leadsim::write_bundle(bundle, (fs::path(out) / "analysis").string());
    auto report = bundle.files.find("report.md");
    if (report != bundle.files.end()) std::cout << report->second;
    for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "analyzed " << result.entries.size() << " trials from " << dataset_dir << "\n";
    return 0;
}

// Score/episode recomputation for an arbitrary two-agent track. Tracks that
// never report a Lead phase (foreign recordings) fall back to a pure
// follow-score mask for episode extraction.
int cmd_metrics(const std::string& track_path, const CommonOpts& o, bool resample) {
    leadsim::ParamSet params;
    if (!o.params_path.empty()) params = leadsim::load_params_file(o.params_path);
    params.validate();

    leadsim::TrialRecord record =
        leadsim::read_record(track_path, params.timebase.rate, resample);
    std::vector<leadsim::ScoreState> scores = leadsim::recompute_scores(record, params);

    const double dt = params.timebase.dt();
    bool any_lead = false;
    for (const auto& row : record.rows) any_lead |= (row.phase == leadsim::Phase::Lead);

    std::vector<double> follow(scores.size());
    std::vector<std::uint8_t> lead_mask(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        follow[k] = scores[k].follow;
        lead_mask[k] = any_lead ? (record.rows[k].phase == leadsim::Phase::Lead ? 1 : 0) : 1;
    }
    std::vector<leadsim::FollowEpisode> episodes =
        leadsim::extract_follow_episodes(follow, lead_mask, params.follow);

    fs::create_directories(o.out);

    std::string scores_csv = "step,time_s,distance,avoid_score,follow_score\n";
    for (std::size_t k = 0; k < record.rows.size(); ++k) {
        const auto& row = record.rows[k];
        leadsim::detail::append_int(scores_csv, row.step);
        scores_csv += ',';
        leadsim::detail::append_fixed(scores_csv, row.time_s, 6);
        scores_csv += ',';
        leadsim::detail::append_fixed(scores_csv, (row.robot - row.fish).norm(), 6);
        scores_csv += ',';
        leadsim::detail::append_fixed(scores_csv, scores[k].avoid, 6);
        scores_csv += ',';
        leadsim::detail::append_fixed(scores_csv, scores[k].follow, 6);
        scores_csv += '\n';
    }
    write_text(fs::path(o.out) / "scores.csv", scores_csv);

    std::string episodes_csv = "episode,start_step,end_step,start_s,duration_s\n";
    double total_follow = 0;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        const auto& ep = episodes[i];
        episodes_csv += std::to_string(i) + ',' + std::to_string(ep.start_step) + ',' +
                        std::to_string(ep.end_step) + ',';
        leadsim::detail::append_fixed(episodes_csv, static_cast<double>(ep.start_step) * dt, 3);
        episodes_csv += ',';
        leadsim::detail::append_fixed(episodes_csv, ep.duration_s(dt), 3);
        episodes_csv += '\n';
        total_follow += ep.duration_s(dt);
    }
    write_text(fs::path(o.out) / "episodes.csv", episodes_csv);

    // Follow score binned over inter-agent distance (4 cm bins up to the
    // interaction zone), the reanalysis view for external tracks.
    const double bin_w = 4.0;
    const int n_bins = static_cast<int>(std::ceil(params.controller.interaction_zone / bin_w));
    std::vector<double> sums(static_cast<std::size_t>(n_bins), 0.0);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_bins), 0);
    for (std::size_t k = 0; k < record.rows.size(); ++k) {
        const double dist = (record.rows[k].robot - record.rows[k].fish).norm();
        const int bin = static_cast<int>(dist / bin_w);
        if (bin < 0 || bin >= n_bins) continue;
        sums[static_cast<std::size_t>(bin)] += follow[k];
        counts[static_cast<std::size_t>(bin)] += 1;
    }
    std::string fvd_csv = "dist_lo,dist_hi,mean_follow,samples\n";
    for (int b = 0; b < n_bins; ++b) {
        leadsim::detail::append_fixed(fvd_csv, b * bin_w, 1);
        fvd_csv += ',';
        leadsim::detail::append_fixed(fvd_csv, (b + 1) * bin_w, 1);
        fvd_csv += ',';
        const auto n = counts[static_cast<std::size_t>(b)];
        leadsim::detail::append_fixed(fvd_csv, n > 0 ? sums[static_cast<std::size_t>(b)] / n : 0.0,
                                      6);
        fvd_csv += ',' + std::to_string(n) + '\n';
    }
    write_text(fs::path(o.out) / "follow_vs_distance.csv", fvd_csv);

    std::cout << "rows: " << record.rows.size() << "\n"
              << "episodes: " << episodes.size() << "\n"
              << "total_follow_s: " << total_follow << "\n";
    std::cerr << "wrote scores.csv, episodes.csv, follow_vs_distance.csv under " << o.out << "\n";
    return 0;
}

int cmd_defaults(const std::string& out) {
    fs::create_directories(out);
    leadsim::save_params_file(leadsim::ParamSet{}, (fs::path(out) / "default_params.json").string());
    leadsim::save_population_file(leadsim::PopulationConfig{},
                                  (fs::path(out) / "default_population.json").string());
    json ref;
    ref["frequencies"] = leadsim::pretrial_reference_distribution().frequencies;
    write_text(fs::path(out) / "reference_distribution.json", ref.dump(2) + "\n");
    std::cerr << "wrote default_params.json, default_population.json, "
                 "reference_distribution.json under "
              << out << "\n";
    return 0;
}

int cmd_serve(const CommonOpts& o, std::uint16_t port) {
    leadsim::BridgeConfig bcfg;
    bcfg.mode.kind = leadsim::mode_from_name(o.mode);
    bcfg.mode.fixed_value = o.fixed_value;
    if (!o.reference_path.empty()) bcfg.mode.reference = load_reference(o.reference_path);
    bcfg.law = leadsim::law_from_name(o.law);
    if (!o.params_path.empty()) bcfg.params = leadsim::load_params_file(o.params_path);
    bcfg.params.validate();
    bcfg.protocol.duration_s = o.duration_s;
    bcfg.protocol.exit_timeout_s = o.exit_timeout_s;
    bcfg.seed = o.seed;

    leadsim::BridgeServer server(bcfg, port);
    std::cout << "listening on 127.0.0.1:" << server.port() << std::endl;
    server.serve();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop robot-leader / fish simulation laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;
    int n_pretrials = 10;
    int experiment_id = 1;
    int n_per_arm = 40;
    int jobs = 1;
    std::string dataset_dir;
    std::string analyze_out;
    std::string track_path;
    bool resample = false;
    std::uint16_t port = leadsim::kDefaultBridgePort;

    CLI::App* run = app.add_subcommand("run", "Run one closed-loop trial and record it");
    add_seed_option(run, opts);
    add_out_option(run, opts);
    add_mode_options(run, opts);
    add_model_options(run, opts);

    CLI::App* pretrial = app.add_subcommand(
        "pretrial", "Pool adaptive trials into the carefulness reference distribution");
    add_seed_option(pretrial, opts);
    add_out_option(pretrial, opts);
    add_model_options(pretrial, opts);
    pretrial->add_option("-n,--n", n_pretrials, "Number of pretrials")->capture_default_str();

    CLI::App* experiment =
        app.add_subcommand("experiment", "Run a two-arm experiment and analyze it");
    add_seed_option(experiment, opts);
    add_out_option(experiment, opts);
    add_model_options(experiment, opts);
    experiment->add_option("--id", experiment_id, "Control arm: 1 fixed, 2 random, 3 inverse")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    experiment->add_option("-n,--n", n_per_arm, "Trials per arm")->capture_default_str();
    experiment->add_option("-j,--jobs", jobs, "Parallel trial workers")->capture_default_str();
    experiment->add_option("--reference", opts.reference_path,
                           "Reference distribution JSON for the random arm");

    CLI::App* analyze = app.add_subcommand("analyze", "Re-run analysis on a recorded dataset");
    analyze->add_option("dir", dataset_dir, "Experiment output directory")->required();
    analyze->add_option("-o,--out", analyze_out, "Analysis output directory (default: dir)");

    CLI::App* metrics = app.add_subcommand(
        "metrics", "Recompute scores and follow episodes for a trajectory CSV");
    metrics->add_option("track", track_path, "Two-agent trajectory CSV")->required();
    add_out_option(metrics, opts);
    metrics->add_option("--params", opts.params_path, "Parameter JSON file");
    metrics->add_flag("--resample", resample, "Resample off-rate tracks instead of rejecting");

    std::string defaults_out = "configs";
    CLI::App* defaults = app.add_subcommand(
        "defaults", "Write the built-in parameter, population and reference files");
    defaults->add_option("-o,--out", defaults_out, "Output directory")->capture_default_str();

    CLI::App* serve = app.add_subcommand("serve", "Serve the controller over TCP (NDJSON)");
    add_seed_option(serve, opts);
    add_mode_options(serve, opts);
    serve->add_option("--params", opts.params_path, "Parameter JSON file");
    serve->add_option("--carefulness-law", opts.law, "Carefulness update law")
        ->check(CLI::IsMember({"integrator", "leaky"}))
        ->capture_default_str();
    serve->add_option("--exit-timeout", opts.exit_timeout_s, "Release timeout in seconds")
        ->capture_default_str();
    serve->add_option("-p,--port", port, "TCP port (0 = ephemeral)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(opts);
        if (pretrial->parsed()) return cmd_pretrial(opts, n_pretrials);
        if (experiment->parsed()) return cmd_experiment(opts, experiment_id, n_per_arm, jobs);
        if (analyze->parsed()) return cmd_analyze(dataset_dir, analyze_out);
        if (defaults->parsed()) return cmd_defaults(defaults_out);
        if (metrics->parsed()) return cmd_metrics(track_path, opts, resample);
        if (serve->parsed()) return cmd_serve(opts, port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
