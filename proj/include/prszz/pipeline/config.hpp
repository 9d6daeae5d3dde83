#pragma once

#include "prszz/filter/filters.hpp"
#include "prszz/links/patterns.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace prszz::pipeline {

struct TrackerConfig {
    std::string system; // "github" | "jira"
    std::string base_url;
    std::string project;                   // "owner/name" or Jira project key
    std::vector<std::string> project_keys; // Jira keys recognized in text
};

struct ProjectConfig {
    std::filesystem::path repo_path;
    std::filesystem::path snapshot_dir;
    std::filesystem::path output_dir = "out";

    std::vector<TrackerConfig> trackers;
    std::set<std::string> bug_labels; // empty: module defaults
    links::LinkPatternConfig patterns = links::LinkPatternConfig::defaults();
    filter::SizeThresholds thresholds;
    std::int64_t window_start = 0;
    std::int64_t window_end = std::numeric_limits<std::int64_t>::max();
    std::vector<std::string> variants = {"PR"};
    nlohmann::json language_profiles = nlohmann::json::object();
    int jobs = 0; // 0: logical CPUs
    bool merged_aliases_for_baselines = true;
    bool secured_suppresses = false;
    int wholefile_window = 25;

    static ProjectConfig from_json(const nlohmann::json& value,
                                   const std::filesystem::path& base_dir);
    static ProjectConfig load(const std::filesystem::path& path);

    std::set<std::string> project_keys() const;
};

} // namespace prszz::pipeline
