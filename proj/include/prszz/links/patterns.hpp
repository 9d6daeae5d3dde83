#pragma once

#include "prszz/forge/model.hpp"

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace prszz::links {

// Per-system reference patterns. Extensible via config; the defaults are the
// GitHub closing-keyword / parenthesized form and the Jira
// project-key-number form.
struct LinkPatternConfig {
    // ECMAScript regexes applied case-insensitively in GitHub contexts; some
    // capture group must consist of the digits of the issue/PR number.
    std::vector<std::string> github_patterns;
    // Template for Jira keys; "{key}" is replaced by the escaped project
    // key. Some capture group must be the full KEY-NUMBER reference.
    std::string jira_pattern_template;

    static LinkPatternConfig defaults();
};

// Scans free text for issue/PR references. GitHub contexts match both the
// GitHub number patterns and the Jira key patterns (commit messages commonly
// carry Jira keys); Jira contexts match only the key patterns. "#N" hits are
// reported as GithubIssue; callers resolve the shared number space against
// the snapshot. Duplicates are removed keeping first occurrence order.
std::vector<forge::IssueRef>
extract_text_links(std::string_view text, forge::System context_system,
                   const std::set<std::string>& project_keys,
                   const LinkPatternConfig& config = LinkPatternConfig::defaults());

} // namespace prszz::links
