#include "prszz/forge/model.hpp"

#include "prszz/support/errors.hpp"

#include <algorithm>
#include <cctype>

namespace prszz::forge {

std::string_view system_name(System system) {
    switch (system) {
    case System::GithubIssue: return "github";
    case System::JiraIssue: return "jira";
    case System::PullRequest: return "pull";
    }
    return "unknown";
}

System parse_system(std::string_view name) {
    if (name == "github")
        return System::GithubIssue;
    if (name == "jira")
        return System::JiraIssue;
    if (name == "pull")
        return System::PullRequest;
    throw SchemaViolation("unknown system '" + std::string(name) + "'");
}

bool key_less(const std::string& a, const std::string& b) {
    auto all_digits = [](const std::string& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
            return std::isdigit(c) != 0;
        });
    };
    if (all_digits(a) && all_digits(b)) {
        if (a.size() != b.size())
            return a.size() < b.size();
    }
    return a < b;
}

void Snapshot::sort_entries() {
    std::sort(issues.begin(), issues.end(),
              [](const IssueTicket& a, const IssueTicket& b) {
                  return a.ref < b.ref;
              });
    std::sort(pulls.begin(), pulls.end(),
              [](const PullRequest& a, const PullRequest& b) {
                  return a.ref < b.ref;
              });
}

const IssueTicket* Snapshot::find_issue(const IssueRef& ref) const {
    for (const auto& issue : issues)
        if (issue.ref == ref)
            return &issue;
    return nullptr;
}

const PullRequest* Snapshot::find_pull(const std::string& key) const {
    for (const auto& pull : pulls)
        if (pull.ref.key == key)
            return &pull;
    return nullptr;
}

} // namespace prszz::forge
