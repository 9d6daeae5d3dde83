#include "prszz/links/patterns.hpp"

#include "prszz/support/strings.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <regex>

namespace prszz::links {

LinkPatternConfig LinkPatternConfig::defaults() {
    LinkPatternConfig config;
    // Closing-keyword form ("fixes #123", "resolve: #9") or the squash-title
    // form "(#456)". The keyword must start a token and the number must end
    // one; the lookaheads keep matches out of longer alphanumeric tokens
    // while still accepting end-of-text.
    config.github_patterns = {
        R"(((?:^|[^0-9A-Za-z])(?:close[sd]?|fix(?:e[sd])?|resolve[sd]?)+[\s|:]*#(\d+)(?![0-9A-Za-z]))|(\(#(\d+)\)(?!\d)))"};
    // Key preceded by whitespace/colon/brackets or start of text; the number
    // must not continue into a longer alphanumeric token.
    config.jira_pattern_template = R"((?:^|[\s:|\[\(])({key}-\d+)(?![A-Za-z0-9]))";
    return config;
}

namespace {

std::string escape_regex(std::string_view text) {
    static const std::string special = R"(\^$.|?*+()[]{})";
    std::string out;
    for (char c : text) {
        if (special.find(c) != std::string::npos)
            out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

const std::regex& compiled(const std::string& pattern) {
    static std::mutex mutex;
    static std::map<std::string, std::regex> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(pattern);
    if (it == cache.end())
        it = cache
                 .emplace(pattern,
                          std::regex(pattern, std::regex::ECMAScript |
                                                  std::regex::icase))
                 .first;
    return it->second;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
}

bool looks_like_issue_key(const std::string& s) {
    auto dash = s.rfind('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 >= s.size())
        return false;
    return all_digits(s.substr(dash + 1));
}

// The payload group is the first captured group shaped like the reference
// itself: all digits (GitHub numbers) or KEY-NUMBER (Jira keys). Keyword
// groups like "fixes" are skipped.
std::string payload_capture(const std::smatch& match, bool jira) {
    for (std::size_t i = 1; i < match.size(); ++i) {
        if (!match[i].matched)
            continue;
        std::string text = match[i].str();
        if (jira ? looks_like_issue_key(text) : all_digits(text))
            return text;
    }
    return {};
}

struct Hit {
    std::size_t position;
    forge::IssueRef ref;
};

void scan(const std::string& text, const std::regex& regex, forge::System system,
          std::vector<Hit>& hits, const std::string& canonical_key = {}) {
    auto begin = std::sregex_iterator(text.begin(), text.end(), regex);
    auto end = std::sregex_iterator();
    for (auto it = begin; it != end; ++it) {
        std::string payload =
            payload_capture(*it, system == forge::System::JiraIssue);
        if (payload.empty())
            continue;
        forge::IssueRef ref;
        ref.system = system;
        if (system == forge::System::JiraIssue && !canonical_key.empty()) {
            // Normalize the project-key casing to the configured one.
            auto dash = payload.rfind('-');
            ref.key = canonical_key + payload.substr(dash);
        } else {
            ref.key = payload;
        }
        hits.push_back({static_cast<std::size_t>(it->position(0)), ref});
    }
}

} // namespace

std::vector<forge::IssueRef>
extract_text_links(std::string_view text, forge::System context_system,
                   const std::set<std::string>& project_keys,
                   const LinkPatternConfig& config) {
    if (text.empty())
        return {};
    std::string subject(text);
    std::vector<Hit> hits;

    if (context_system != forge::System::JiraIssue) {
        for (const auto& pattern : config.github_patterns)
            scan(subject, compiled(pattern), forge::System::GithubIssue, hits);
    }
    for (const auto& key : project_keys) {
        std::string pattern = config.jira_pattern_template;
        auto pos = pattern.find("{key}");
        if (pos != std::string::npos)
            pattern.replace(pos, 5, escape_regex(key));
        scan(subject, compiled(pattern), forge::System::JiraIssue, hits, key);
    }

    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return a.position < b.position;
    });

    std::vector<forge::IssueRef> out;
    for (const auto& hit : hits) {
        if (std::find(out.begin(), out.end(), hit.ref) == out.end())
            out.push_back(hit.ref);
    }
    return out;
}

} // namespace prszz::links
