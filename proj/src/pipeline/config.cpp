#include "prszz/pipeline/config.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/json_io.hpp"

namespace prszz::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path path(value);
    return path.is_absolute() ? path : base / path;
}

} // namespace

ProjectConfig ProjectConfig::from_json(const json& value, const fs::path& base_dir) {
    ProjectConfig config;
    if (value.contains("repo"))
        config.repo_path = resolve(base_dir, value.at("repo").get<std::string>());
    if (value.contains("snapshot"))
        config.snapshot_dir =
            resolve(base_dir, value.at("snapshot").get<std::string>());
    if (value.contains("output"))
        config.output_dir =
            resolve(base_dir, value.at("output").get<std::string>());

    for (const auto& tracker : value.value("trackers", json::array())) {
        TrackerConfig tc;
        tc.system = tracker.value("system", "github");
        tc.base_url = tracker.value("base_url", "");
        tc.project = tracker.value("project", "");
        for (const auto& key : tracker.value("project_keys", json::array()))
            tc.project_keys.push_back(key.get<std::string>());
        config.trackers.push_back(std::move(tc));
    }

    for (const auto& label : value.value("bug_labels", json::array()))
        config.bug_labels.insert(label.get<std::string>());

    if (auto patterns = value.find("patterns"); patterns != value.end()) {
        if (auto gh = patterns->find("github"); gh != patterns->end()) {
            config.patterns.github_patterns.clear();
            for (const auto& pattern : *gh)
                config.patterns.github_patterns.push_back(
                    pattern.get<std::string>());
        }
        if (auto jira = patterns->find("jira"); jira != patterns->end())
            config.patterns.jira_pattern_template = jira->get<std::string>();
    }

    if (auto thresholds = value.find("thresholds"); thresholds != value.end()) {
        config.thresholds.max_files =
            thresholds->value("max_files", config.thresholds.max_files);
        config.thresholds.max_lines =
            thresholds->value("max_lines", config.thresholds.max_lines);
    }

    if (auto window = value.find("window"); window != value.end()) {
        config.window_start = window->value("start", config.window_start);
        config.window_end = window->value("end", config.window_end);
    }
    if (config.window_start >= config.window_end)
        throw ConfigError("window start must precede window end");

    if (auto variants = value.find("variants"); variants != value.end()) {
        config.variants.clear();
        for (const auto& name : *variants)
            config.variants.push_back(name.get<std::string>());
    }

    config.language_profiles =
        value.value("language_profiles", json::object());
    config.jobs = value.value("jobs", 0);
    config.merged_aliases_for_baselines =
        value.value("merged_aliases_for_baselines", true);
    config.secured_suppresses = value.value("secured_suppresses", false);
    config.wholefile_window = value.value("wholefile_window", 25);
    return config;
}

ProjectConfig ProjectConfig::load(const fs::path& path) {
    try {
        return from_json(json_io::read_file(path), path.parent_path());
    } catch (const SchemaViolation& e) {
        throw ConfigError(e.what());
    }
}

std::set<std::string> ProjectConfig::project_keys() const {
    std::set<std::string> keys;
    for (const auto& tracker : trackers)
        for (const auto& key : tracker.project_keys)
            keys.insert(key);
    return keys;
}

} // namespace prszz::pipeline
