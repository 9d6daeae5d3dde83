#include "prszz/eval/dataset.hpp"
#include "prszz/eval/metrics.hpp"
#include "prszz/fixture/generator.hpp"
#include "prszz/fixture/script.hpp"
#include "prszz/forge/clients.hpp"
#include "prszz/forge/snapshot_store.hpp"
#include "prszz/pipeline/pipeline.hpp"
#include "prszz/support/errors.hpp"
#include "prszz/support/json_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prszz;

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value == nullptr ? std::string() : std::string(value);
}

struct CommonArgs {
    std::string config_path;
    int jobs = 0;
};

pipeline::ProjectConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty())
        throw ConfigError("--config is required");
    auto config = pipeline::ProjectConfig::load(args.config_path);
    if (args.jobs > 0)
        config.jobs = args.jobs;
    return config;
}

void write_stage_manifest(const pipeline::ProjectConfig& config,
                          const std::string& stage,
                          const std::vector<std::string>& artifacts) {
    json manifest;
    fs::path path = config.output_dir / "manifest.json";
    if (fs::exists(path))
        manifest = json_io::read_file(path);
    json list = json::array();
    for (const auto& artifact : artifacts)
        list.push_back(artifact);
    manifest[stage] = std::move(list);
    json_io::write_file(path, manifest);
}

int cmd_ingest(const CommonArgs& common, bool live,
               const std::string& replay_dir) {
    auto config = load_config(common);
    if (config.trackers.empty())
        throw ConfigError("no trackers configured");

    std::unique_ptr<forge::HttpTransport> transport;
    if (live)
        transport = std::make_unique<forge::LiveTransport>();
    else if (!replay_dir.empty())
        transport = std::make_unique<forge::RecordedTransport>(replay_dir);
    else
        throw ConfigError("ingest needs --live or --replay <dir>");

    forge::Snapshot combined;
    for (const auto& tracker : config.trackers) {
        forge::Snapshot part;
        if (tracker.system == "github") {
            std::string base = tracker.base_url.empty() ? "https://api.github.com"
                                                        : tracker.base_url;
            part = forge::fetch_github(*transport, tracker.project,
                                       env_or_empty("PRSZZ_GITHUB_TOKEN"),
                                       config.window_start, config.window_end,
                                       base);
        } else if (tracker.system == "jira") {
            part = forge::fetch_jira(*transport, tracker.base_url,
                                     tracker.project,
                                     env_or_empty("PRSZZ_JIRA_TOKEN"),
                                     config.window_start, config.window_end);
        } else {
            throw ConfigError("unknown tracker system '" + tracker.system + "'");
        }
        if (combined.project_id.empty())
            combined.project_id = part.project_id;
        combined.fetched_at = std::max(combined.fetched_at, part.fetched_at);
        combined.issues.insert(combined.issues.end(), part.issues.begin(),
                               part.issues.end());
        combined.pulls.insert(combined.pulls.end(), part.pulls.begin(),
                              part.pulls.end());
    }
    combined.sort_entries();
    forge::save_snapshot(combined, config.snapshot_dir);
    std::cout << "snapshot: " << combined.issues.size() << " issues, "
              << combined.pulls.size() << " pull requests -> "
              << config.snapshot_dir.string() << "\n";
    return 0;
}

int cmd_match(const CommonArgs& common) {
    auto config = load_config(common);
    auto data = pipeline::prepare(config);

    auto records = pipeline::run_match(data, config);
    auto baseline = pipeline::run_match_bszz(data, config);

    fs::create_directories(config.output_dir);
    json_io::write_file(config.output_dir / "fix_records.json",
                        pipeline::fix_records_to_json(records));
    json_io::write_file(config.output_dir / "fix_records_bszz.json",
                        pipeline::fix_records_to_json(baseline));
    data.graph.dump_csv(config.output_dir / "links.csv");
    write_stage_manifest(config, "match",
                         {"fix_records.json", "fix_records_bszz.json",
                          "links.csv"});

    std::size_t mapped = 0;
    for (const auto& record : records)
        if (record.fixing_commit)
            ++mapped;
    std::cout << "matched " << mapped << "/" << records.size()
              << " bugs to fixing commits\n";
    return 0;
}

int cmd_trace(const CommonArgs& common, std::vector<std::string> variants) {
    auto config = load_config(common);
    if (variants.empty())
        variants = config.variants;

    auto data = pipeline::prepare(config);
    auto records = pipeline::fix_records_from_json(
        json_io::read_file(config.output_dir / "fix_records.json"));

    // The persisted blame cache is reusable while the repository head is
    // unchanged.
    fs::path cache_path = config.output_dir / "blame_cache.json";
    auto head = data.repo->head();
    if (head)
        data.blame_cache->load_file(cache_path, *head);

    std::vector<std::string> artifacts;
    for (const auto& name : variants) {
        auto variant = trace::VariantId::parse(name);
        if (!variant)
            throw ConfigError("unknown variant '" + name + "'");
        auto results = pipeline::run_trace(data, config, *variant, records);

        json_io::write_file(config.output_dir / ("trace_" + name + ".json"),
                            pipeline::trace_results_to_json(results));
        artifacts.push_back("trace_" + name + ".json");
        for (auto level : {trace::GrainLevel::Commit, trace::GrainLevel::File,
                           trace::GrainLevel::Method}) {
            std::string file = "dataset_" + name + "_" +
                               std::string(trace::grain_name(level)) + ".csv";
            eval::write_dataset(results, level, config.output_dir / file);
            artifacts.push_back(file);
        }
        std::cout << "variant " << name << ": " << results.size()
                  << " fixes traced\n";
    }
    if (head)
        data.blame_cache->save_file(cache_path, *head);
    write_stage_manifest(config, "trace", artifacts);
    return 0;
}

int cmd_evaluate(const CommonArgs& common, const std::string& truth_path,
                 const std::vector<std::string>& macro_dirs) {
    auto config = load_config(common);
    if (truth_path.empty())
        throw ConfigError("--truth is required");
    if (!fs::exists(truth_path))
        throw MissingTruth("truth file not found: " + truth_path);
    auto truth = eval::GroundTruth::load(truth_path);

    json report;
    auto records = pipeline::fix_records_from_json(
        json_io::read_file(config.output_dir / "fix_records.json"));
    report["fixing"] = eval::metrics_to_json(eval::eval_fixing(records, truth));
    report["coverage"] = eval::fixing_coverage(records);

    if (fs::exists(config.output_dir / "fix_records_bszz.json")) {
        auto baseline = pipeline::fix_records_from_json(
            json_io::read_file(config.output_dir / "fix_records_bszz.json"));
        report["fixing_bszz"] =
            eval::metrics_to_json(eval::eval_fixing(baseline, truth));
        report["coverage_bszz"] = eval::fixing_coverage(baseline);
    }

    // Per-variant inducing metrics in the variant's natural reading:
    // selection variants score their selected commit, the others their full
    // non-rejected suspect sets (also reported under variants_full).
    json variants = json::object();
    json variants_full = json::object();
    for (const auto& name : config.variants) {
        fs::path path = config.output_dir / ("trace_" + name + ".json");
        if (!fs::exists(path))
            continue;
        auto results =
            pipeline::trace_results_from_json(json_io::read_file(path));
        auto variant = trace::VariantId::parse(name);
        bool selects = variant && variant->selection.has_value();
        variants[name] = eval::metrics_to_json(
            eval::eval_inducing(results, truth, selects));
        variants_full[name] = eval::metrics_to_json(
            eval::eval_inducing(results, truth, false));
    }
    report["variants"] = std::move(variants);
    report["variants_full"] = std::move(variants_full);

    if (!macro_dirs.empty()) {
        // Unweighted mean over per-project reports (project averaging).
        json macro = json::object();
        double precision = 0, recall = 0, f_score = 0;
        int count = 0;
        for (const auto& dir : macro_dirs) {
            auto other = json_io::read_file(fs::path(dir) / "metrics.json");
            precision += other["fixing"]["precision"].get<double>();
            recall += other["fixing"]["recall"].get<double>();
            f_score += other["fixing"]["f_score"].get<double>();
            ++count;
        }
        if (count > 0) {
            macro["fixing"] = {{"precision", precision / count},
                               {"recall", recall / count},
                               {"f_score", f_score / count},
                               {"projects", count}};
        }
        report["macro"] = std::move(macro);
    }

    json_io::write_file(config.output_dir / "metrics.json", report);
    write_stage_manifest(config, "evaluate", {"metrics.json"});
    std::cout << json_io::canonical(report);
    return 0;
}

int cmd_fixture(const std::string& script_path, const std::string& out_dir,
                bool verify) {
    auto script =
        fixture::FixtureScript::from_json(json_io::read_file(script_path));
    auto generated = fixture::generate_fixture(script, out_dir, verify);
    std::cout << "fixture: " << generated.mainline.size()
              << " mainline commits, " << generated.snapshot.issues.size()
              << " issues, " << generated.snapshot.pulls.size()
              << " pull requests -> " << out_dir << "\n";
    return 0;
}

int cmd_run(const CommonArgs& common, const std::string& truth_path) {
    int rc = cmd_match(common);
    if (rc != 0)
        return rc;
    rc = cmd_trace(common, {});
    if (rc != 0)
        return rc;
    if (!truth_path.empty())
        return cmd_evaluate(common, truth_path, {});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pull-request-aware defect tracing pipeline"};
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("--config", common.config_path, "project config file")
        ->envname("PRSZZ_CONFIG");
    app.add_option("--jobs", common.jobs, "parallel workers");

    bool live = false;
    std::string replay_dir;
    auto* ingest = app.add_subcommand("ingest", "fetch forge data to a snapshot");
    ingest->add_flag("--live", live, "talk to the real forge APIs");
    ingest->add_option("--replay", replay_dir, "recorded-response directory");

    app.add_subcommand("match", "map bugs to fixing commits");

    std::vector<std::string> variants;
    auto* trace_cmd = app.add_subcommand("trace", "trace inducing commits");
    trace_cmd->add_option("--variant", variants, "variant names (default: config)");

    std::string truth_path;
    std::vector<std::string> macro_dirs;
    auto* evaluate = app.add_subcommand("evaluate", "score against ground truth");
    evaluate->add_option("--truth", truth_path, "ground truth JSON");
    evaluate->add_option("--macro-over", macro_dirs,
                         "other output dirs for project averaging");

    std::string script_path, fixture_out;
    bool no_verify = false;
    auto* fixture_cmd =
        app.add_subcommand("fixture", "generate a synthetic repository fixture");
    fixture_cmd->add_option("--script", script_path, "fixture script JSON")
        ->required();
    fixture_cmd->add_option("--out", fixture_out, "output directory")->required();
    fixture_cmd->add_flag("--no-verify", no_verify,
                          "skip replay verification of the declared truth");

    std::string run_truth;
    auto* run = app.add_subcommand("run", "match + trace + evaluate");
    run->add_option("--truth", run_truth, "ground truth JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("ingest"))
            return cmd_ingest(common, live, replay_dir);
        if (app.got_subcommand("match"))
            return cmd_match(common);
        if (app.got_subcommand("trace"))
            return cmd_trace(common, variants);
        if (app.got_subcommand("evaluate"))
            return cmd_evaluate(common, truth_path, macro_dirs);
        if (app.got_subcommand("fixture"))
            return cmd_fixture(script_path, fixture_out, !no_verify);
        if (app.got_subcommand("run"))
            return cmd_run(common, run_truth);
    } catch (const ConfigError& e) {
        std::cerr << nlohmann::json{{"error", e.code()}, {"detail", e.what()}}
                  << "\n";
        return 2;
    } catch (const prszz::Error& e) {
        std::cerr << nlohmann::json{{"error", e.code()}, {"detail", e.what()}}
                  << "\n";
        return e.code() == "MissingTruth" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "Unexpected"}, {"detail", e.what()}}
                  << "\n";
        return 1;
    }
    return 2;
}
