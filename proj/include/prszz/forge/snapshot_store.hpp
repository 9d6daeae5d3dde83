#pragma once

#include "prszz/forge/model.hpp"

#include <filesystem>

namespace prszz::forge {

// One canonical-JSON file per entity under <dir>/issues and <dir>/pulls,
// plus a manifest. save followed by load reproduces the snapshot exactly;
// unknown JSON fields on entities survive the round trip verbatim.
void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& dir);
Snapshot load_snapshot(const std::filesystem::path& dir);

nlohmann::json issue_to_json(const IssueTicket& issue);
IssueTicket issue_from_json(const nlohmann::json& value);
nlohmann::json pull_to_json(const PullRequest& pull);
PullRequest pull_from_json(const nlohmann::json& value);

} // namespace prszz::forge
