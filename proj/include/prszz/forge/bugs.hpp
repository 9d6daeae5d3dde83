#pragma once

#include "prszz/forge/model.hpp"

#include <set>
#include <string>
#include <vector>

namespace prszz::forge {

struct BugPolicy {
    // Case-insensitive label vocabulary; Jira issue types are already folded
    // into labels by the fetcher.
    std::set<std::string> bug_labels = {"bug", "type: bug", "kind/bug", "defect"};
};

// A resolved, bug-labeled issue ticket or merged bug-labeled pull request.
// Borrows from the snapshot; the snapshot must outlive the carriers.
struct BugCarrier {
    IssueRef ref;
    const IssueTicket* issue = nullptr;
    const PullRequest* pull = nullptr;

    const std::string& title() const { return issue ? issue->title : pull->title; }
    std::int64_t created_at() const {
        return issue ? issue->created_at : pull->created_at;
    }
    std::optional<std::int64_t> closed_at() const {
        return issue ? issue->closed_at : pull->closed_at;
    }
    const std::optional<std::string>& assignee() const {
        return issue ? issue->assignee : pull->assignee;
    }
};

bool has_bug_label(const std::set<std::string>& labels, const BugPolicy& policy);
bool is_resolved_issue(const IssueTicket& issue);

// Pure filter: bug label present AND resolved/merged.
std::vector<BugCarrier> select_bug_tickets(const Snapshot& snapshot,
                                           const BugPolicy& policy = {});

} // namespace prszz::forge
