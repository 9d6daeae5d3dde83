#include "prszz/forge/bugs.hpp"

#include "prszz/support/strings.hpp"

namespace prszz::forge {

bool has_bug_label(const std::set<std::string>& labels, const BugPolicy& policy) {
    for (const auto& label : labels)
        for (const auto& wanted : policy.bug_labels)
            if (strings::iequals(label, wanted))
                return true;
    return false;
}

bool is_resolved_issue(const IssueTicket& issue) {
    if (issue.ref.system == System::GithubIssue)
        return strings::iequals(issue.status, "closed");

    // Jira: a terminal status plus a resolution that is an actual fix
    // outcome. Duplicates are folded by link-graph merging instead.
    bool terminal = strings::iequals(issue.status, "resolved") ||
                    strings::iequals(issue.status, "closed") ||
                    strings::iequals(issue.status, "done");
    if (!terminal || !issue.resolution)
        return false;
    for (const char* excluded : {"won't fix", "wont fix", "invalid", "duplicate"})
        if (strings::iequals(*issue.resolution, excluded))
            return false;
    return true;
}

std::vector<BugCarrier> select_bug_tickets(const Snapshot& snapshot,
                                           const BugPolicy& policy) {
    std::vector<BugCarrier> out;
    for (const auto& issue : snapshot.issues) {
        if (!has_bug_label(issue.labels, policy))
            continue;
        if (!is_resolved_issue(issue))
            continue;
        out.push_back({issue.ref, &issue, nullptr});
    }
    for (const auto& pull : snapshot.pulls) {
        if (!has_bug_label(pull.labels, policy))
            continue;
        if (!pull.merged)
            continue;
        out.push_back({pull.ref, nullptr, &pull});
    }
    return out;
}

} // namespace prszz::forge
