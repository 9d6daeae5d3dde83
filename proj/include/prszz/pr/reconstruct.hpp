#pragma once

#include "prszz/forge/model.hpp"
#include "prszz/vcs/repository.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace prszz::pr {

enum class MergeStrategy { MergeCommit, Rebase, Squash, Unknown };

std::string_view strategy_name(MergeStrategy strategy);

// Reconstructed relation between a merged pull request's inner commits and
// the commits that actually entered the VCS history.
struct InnerCommitMap {
    forge::IssueRef pr;
    MergeStrategy strategy = MergeStrategy::Unknown;
    // (inner hash as reported by the forge, VCS equivalent or absent).
    std::vector<std::pair<vcs::ObjectId, std::optional<vcs::ObjectId>>> pairs;
    vcs::ObjectId resolving_commit; // the commit that accepted the PR
    std::optional<vcs::ObjectId> last_before;
    std::optional<vcs::ObjectId> first_after;

    std::vector<vcs::ObjectId> mapped_commits() const; // distinct, pair order
    bool contains(const vcs::ObjectId& id) const;
};

// Classification per the observed integration workflows. Throws NotMerged
// for open/unmerged pull requests.
MergeStrategy detect_strategy(const forge::PullRequest& pull,
                              const vcs::Repository& repo);

// Throws StrategyUnknown when strategy == Unknown.
InnerCommitMap map_inner_commits(const forge::PullRequest& pull,
                                 const vcs::Repository& repo,
                                 MergeStrategy strategy);

// last commit before the PR's first mapped commit (outside the PR) and the
// first mainline commit after the resolving commit.
std::pair<std::optional<vcs::ObjectId>, std::optional<vcs::ObjectId>>
boundary_commits(const forge::PullRequest& pull, const vcs::Repository& repo,
                 const InnerCommitMap& map);

// detect + map + boundaries; nullopt when the PR is unmerged or the
// strategy cannot be reconstructed.
std::optional<InnerCommitMap> reconstruct(const forge::PullRequest& pull,
                                          const vcs::Repository& repo);

} // namespace prszz::pr
