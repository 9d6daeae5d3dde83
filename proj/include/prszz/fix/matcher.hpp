#pragma once

#include "prszz/links/dedup.hpp"
#include "prszz/links/graph.hpp"
#include "prszz/pr/reconstruct.hpp"
#include "prszz/vcs/repository.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prszz::fix {

struct ConfidenceScore {
    int value = 0;
    std::vector<std::string> reasons; // value == reasons.size()

    void grant(std::string reason) {
        ++value;
        reasons.push_back(std::move(reason));
    }
};

enum class MatchRoute { PrLink, MessageMatch, None };

std::string_view route_name(MatchRoute route);

struct FixRecord {
    forge::IssueRef bug; // DistinctBug canonical ref
    std::optional<vcs::ObjectId> fixing_commit;
    std::optional<forge::IssueRef> fixing_pr;
    MatchRoute via = MatchRoute::None;
    std::optional<ConfidenceScore> score;
};

// Syntactic and semantic confidence of a candidate fixing PR. The
// time-proximity condition is comparative: it is granted to the candidate
// whose (created_at, closed_at) pair is nearest the bug's among
// `candidates`, and vacuously for a lone candidate.
ConfidenceScore score_fixing_pr(const links::DistinctBug& bug,
                                const forge::PullRequest& pr,
                                const links::LinkGraph& graph,
                                const std::vector<const forge::PullRequest*>&
                                    candidates = {});

// Argmax over the candidates; a single candidate is selected unconditionally.
// Ties: closed_at nearest the bug's resolution, then lowest PR number.
const forge::PullRequest*
select_fixing_pr(const links::DistinctBug& bug,
                 const std::vector<const forge::PullRequest*>& candidates,
                 const links::LinkGraph& graph);

// The fixing VCS commit among a PR's mapped commits (or message-matched
// commits): assignee authorship, bug-key mention and recency scoring,
// newest-commit tie-break.
std::optional<vcs::ObjectId>
select_fixing_commit(const links::DistinctBug& bug,
                     const std::vector<vcs::ObjectId>& candidates,
                     const vcs::Repository& repo,
                     const std::set<std::string>& project_keys);

struct MatcherOptions {
    std::set<std::string> project_keys;
    links::LinkPatternConfig patterns = links::LinkPatternConfig::defaults();
    int jobs = 1; // per-bug parallelism
};

// Phase 1 end-to-end: PR route first, commit-message fallback, None when
// nothing is linked. Deterministic.
std::vector<FixRecord>
match_all_fixes(const std::vector<links::DistinctBug>& bugs,
                const forge::Snapshot& snapshot, const vcs::Repository& repo,
                const links::LinkGraph& graph,
                const std::map<std::string, pr::InnerCommitMap>& inner_maps,
                const MatcherOptions& options);

// B-SZZ*-style baseline: commit-message matching only, newest candidate
// selected.
std::vector<FixRecord>
match_all_fixes_bszz(const std::vector<links::DistinctBug>& bugs,
                     const vcs::Repository& repo, const MatcherOptions& options);

} // namespace prszz::fix
