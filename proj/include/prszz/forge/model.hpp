#pragma once

#include "prszz/vcs/object_id.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace prszz::forge {

enum class System { GithubIssue, JiraIssue, PullRequest };

std::string_view system_name(System system);
System parse_system(std::string_view name);

// Numeric keys compare numerically, everything else lexicographically.
bool key_less(const std::string& a, const std::string& b);

struct IssueRef {
    System system = System::GithubIssue;
    std::string key; // "4521" (normalized, no '#') or "KAFKA-9176"

    bool operator==(const IssueRef&) const = default;
    bool operator<(const IssueRef& other) const {
        if (system != other.system)
            return system < other.system;
        return key_less(key, other.key);
    }
    std::string to_string() const {
        return std::string(system_name(system)) + ":" + key;
    }
};

struct Comment {
    std::string author;
    std::int64_t time = 0;
    std::string text;
};

struct IntegratedLink {
    IssueRef target;
    std::string kind; // "integrated", "mention", "duplicate", ...
};

struct IssueTicket {
    IssueRef ref;
    std::string title;
    std::string description;
    std::set<std::string> labels;
    std::string status;
    std::optional<std::string> resolution;
    std::int64_t created_at = 0;
    std::optional<std::int64_t> closed_at;
    std::optional<std::string> assignee;
    std::vector<Comment> comments;
    std::vector<IntegratedLink> integrated_links;
    nlohmann::json extra = nlohmann::json::object(); // unknown fields, kept verbatim
};

struct InnerFileChange {
    std::string path;
    int added_lines = 0;
    int removed_lines = 0;
    // New-file line ranges touched, when the forge provides patch data.
    std::vector<std::pair<int, int>> added_ranges;
};

struct InnerCommit {
    vcs::ObjectId hash; // as reported by the forge
    std::string message;
    std::string author_name;
    std::string author_email;
    std::int64_t author_time = 0;
    // absent: file data unavailable from the forge (disables f2/f3).
    std::optional<std::vector<InnerFileChange>> files;
};

enum class PrState { Open, Closed };

struct PullRequest {
    IssueRef ref; // system == PullRequest
    std::string title;
    std::string description;
    PrState state = PrState::Open;
    bool merged = false;
    std::optional<vcs::ObjectId> merge_commit;
    std::int64_t created_at = 0;
    std::optional<std::int64_t> closed_at;
    std::optional<std::string> assignee;
    std::set<std::string> labels;
    std::vector<InnerCommit> inner_commits; // forge order preserved
    std::vector<Comment> comments;
    std::vector<Comment> reviews;
    std::vector<IntegratedLink> integrated_links;
    nlohmann::json extra = nlohmann::json::object();

    int number() const { return std::stoi(ref.key); }
};

struct Snapshot {
    std::string project_id;
    std::int64_t fetched_at = 0;
    std::vector<IssueTicket> issues; // sorted by ref
    std::vector<PullRequest> pulls;  // sorted by ref

    void sort_entries();
    const IssueTicket* find_issue(const IssueRef& ref) const;
    const PullRequest* find_pull(const std::string& key) const;
};

} // namespace prszz::forge
