#pragma once

#include "prszz/fix/matcher.hpp"
#include "prszz/lang/profile.hpp"
#include "prszz/pr/reconstruct.hpp"
#include "prszz/vcs/diff.hpp"

#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace prszz::filter {

enum class AppliedFilter { F1, F2, F3, SizeThreshold };

struct SizeThresholds {
    std::size_t max_files = 100;
    std::size_t max_lines = 10000;
};

struct FilteredFix {
    fix::FixRecord fix;
    vcs::ObjectId base; // f1 diff base
    std::vector<vcs::FileDiff> files;
    std::set<AppliedFilter> filters_applied;
    bool rejected = false;
    std::string rejection_reason;
};

// First ancestor of the fixing commit outside the fixing PR; without PR
// context, the first parent. Throws NoAncestorOutsidePr when history runs
// out inside the PR.
vcs::ObjectId diff_base_f1(const vcs::Repository& repo,
                           const vcs::ObjectId& fix_commit,
                           const pr::InnerCommitMap* pr_map);

// Keeps only files touched by at least one inner commit. Disabled (no-op,
// `applied` false) when any inner commit lacks forge file data.
std::vector<vcs::FileDiff> filter_files_f2(std::vector<vcs::FileDiff> diffs,
                                           const forge::PullRequest& pull,
                                           bool& applied);

// For squashed PRs: selects the actual fixing inner commit by the confidence
// scheme and keeps only its files. No-op for non-squashed strategies or when
// the selected inner commit has no file data.
std::vector<vcs::FileDiff> filter_files_f3(std::vector<vcs::FileDiff> diffs,
                                           const forge::PullRequest& pull,
                                           const pr::InnerCommitMap& map,
                                           const links::DistinctBug& bug,
                                           bool& applied);

// The inner commit f3 would select (exposed for fine-grained refinement).
const forge::InnerCommit* select_fixing_inner(const forge::PullRequest& pull,
                                              const links::DistinctBug& bug);

struct SizeRejection {
    std::string reason;
};
std::variant<std::vector<vcs::FileDiff>, SizeRejection>
apply_size_threshold(std::vector<vcs::FileDiff> diffs,
                     const SizeThresholds& thresholds);

} // namespace prszz::filter
