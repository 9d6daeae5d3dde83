#include "prszz/filter/filters.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"

#include <algorithm>

namespace prszz::filter {

using forge::InnerCommit;
using forge::PullRequest;
using vcs::FileDiff;
using vcs::ObjectId;
using vcs::Repository;

ObjectId diff_base_f1(const Repository& repo, const ObjectId& fix_commit,
                      const pr::InnerCommitMap* pr_map) {
    auto cursor = fix_commit;
    while (true) {
        auto commit = repo.commit(cursor);
        if (commit->parents.empty())
            throw NoAncestorOutsidePr("no ancestor outside the fixing PR above " +
                                      fix_commit.hex());
        ObjectId parent = commit->parents.front();
        if (pr_map == nullptr || !pr_map->contains(parent))
            return parent;
        cursor = parent;
    }
}

namespace {

bool diff_touches(const FileDiff& diff, const std::set<std::string>& paths) {
    if (diff.new_path && paths.contains(*diff.new_path))
        return true;
    return diff.old_path && paths.contains(*diff.old_path);
}

} // namespace

std::vector<FileDiff> filter_files_f2(std::vector<FileDiff> diffs,
                                      const PullRequest& pull, bool& applied) {
    applied = false;
    std::set<std::string> inner_paths;
    for (const auto& inner : pull.inner_commits) {
        if (!inner.files)
            return diffs; // forge data unavailable: filter disabled
        for (const auto& file : *inner.files)
            inner_paths.insert(file.path);
    }
    if (pull.inner_commits.empty())
        return diffs;

    applied = true;
    std::erase_if(diffs, [&](const FileDiff& diff) {
        return !diff_touches(diff, inner_paths);
    });
    return diffs;
}

const InnerCommit* select_fixing_inner(const PullRequest& pull,
                                       const links::DistinctBug& bug) {
    if (pull.inner_commits.empty())
        return nullptr;
    if (pull.inner_commits.size() == 1)
        return &pull.inner_commits.front();

    links::LinkPatternConfig patterns = links::LinkPatternConfig::defaults();
    std::set<std::string> keys;
    for (const auto& alias : bug.aliases) {
        if (alias.system == forge::System::JiraIssue) {
            auto dash = alias.key.rfind('-');
            if (dash != std::string::npos)
                keys.insert(alias.key.substr(0, dash));
        }
    }

    auto mentions_bug = [&](const InnerCommit& inner) {
        auto refs = links::extract_text_links(
            inner.message, forge::System::GithubIssue, keys, patterns);
        for (const auto& ref : refs)
            for (const auto& alias : bug.aliases) {
                if (ref.system == forge::System::JiraIssue) {
                    if (alias.system == forge::System::JiraIssue &&
                        alias.key == ref.key)
                        return true;
                } else if ((alias.system == forge::System::GithubIssue ||
                            alias.system == forge::System::PullRequest) &&
                           alias.key == ref.key) {
                    return true;
                }
            }
        return false;
    };

    std::int64_t bug_closed = bug.merged_ticket.closed_at.value_or(
        bug.merged_ticket.created_at);
    const InnerCommit* most_recent_before = nullptr;
    for (const auto& inner : pull.inner_commits) {
        if (inner.author_time > bug_closed)
            continue;
        if (most_recent_before == nullptr ||
            inner.author_time > most_recent_before->author_time)
            most_recent_before = &inner;
    }

    const InnerCommit* best = nullptr;
    int best_score = -1;
    for (const auto& inner : pull.inner_commits) {
        int score = 0;
        const auto& assignee = bug.merged_ticket.assignee;
        if (assignee && (strings::iequals(*assignee, inner.author_name) ||
                         strings::iequals(*assignee, inner.author_email)))
            ++score;
        if (mentions_bug(inner))
            ++score;
        if (&inner == most_recent_before)
            ++score;

        // Ties go to the newest inner author_time.
        if (score > best_score ||
            (score == best_score && best != nullptr &&
             inner.author_time > best->author_time)) {
            best = &inner;
            best_score = score;
        }
    }
    return best;
}

std::vector<FileDiff> filter_files_f3(std::vector<FileDiff> diffs,
                                      const PullRequest& pull,
                                      const pr::InnerCommitMap& map,
                                      const links::DistinctBug& bug,
                                      bool& applied) {
    applied = false;
    if (map.strategy != pr::MergeStrategy::Squash)
        return diffs;
    const InnerCommit* fixing_inner = select_fixing_inner(pull, bug);
    if (fixing_inner == nullptr || !fixing_inner->files)
        return diffs;

    std::set<std::string> keep;
    for (const auto& file : *fixing_inner->files)
        keep.insert(file.path);

    applied = true;
    std::erase_if(diffs,
                  [&](const FileDiff& diff) { return !diff_touches(diff, keep); });
    return diffs;
}

std::variant<std::vector<FileDiff>, SizeRejection>
apply_size_threshold(std::vector<FileDiff> diffs, const SizeThresholds& thresholds) {
    if (diffs.size() > thresholds.max_files)
        return SizeRejection{"changed files " + std::to_string(diffs.size()) +
                             " exceed max_files " +
                             std::to_string(thresholds.max_files)};
    std::size_t lines = 0;
    for (const auto& diff : diffs)
        lines += diff.changed_lines();
    if (lines > thresholds.max_lines)
        return SizeRejection{"changed lines " + std::to_string(lines) +
                             " exceed max_lines " +
                             std::to_string(thresholds.max_lines)};
    return diffs;
}

} // namespace prszz::filter
