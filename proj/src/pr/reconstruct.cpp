#include "prszz/pr/reconstruct.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"
#include "prszz/vcs/diff.hpp"

#include <algorithm>
#include <set>

namespace prszz::pr {

using forge::PullRequest;
using vcs::ObjectId;
using vcs::Repository;

std::string_view strategy_name(MergeStrategy strategy) {
    switch (strategy) {
    case MergeStrategy::MergeCommit: return "merge_commit";
    case MergeStrategy::Rebase: return "rebase";
    case MergeStrategy::Squash: return "squash";
    case MergeStrategy::Unknown: return "unknown";
    }
    return "unknown";
}

std::vector<ObjectId> InnerCommitMap::mapped_commits() const {
    std::vector<ObjectId> out;
    for (const auto& [inner, mapped] : pairs) {
        if (!mapped)
            continue;
        if (std::find(out.begin(), out.end(), *mapped) == out.end())
            out.push_back(*mapped);
    }
    return out;
}

bool InnerCommitMap::contains(const ObjectId& id) const {
    for (const auto& [inner, mapped] : pairs)
        if (mapped && *mapped == id)
            return true;
    return false;
}

namespace {

bool matches_squash_signature(const Repository& repo, const ObjectId& id,
                              const PullRequest& pull) {
    auto commit = repo.commit(id);
    std::string first = strings::normalized_first_line(commit->message);

    // GitHub's default squash subject ends with "(#N)".
    std::string suffix = "(#" + pull.ref.key + ")";
    if (first.size() >= suffix.size() &&
        first.compare(first.size() - suffix.size(), suffix.size(), suffix) == 0)
        return true;

    // Alternative template: the body lists every inner commit subject.
    if (pull.inner_commits.empty())
        return false;
    for (const auto& inner : pull.inner_commits) {
        std::string line = strings::normalized_first_line(inner.message);
        if (line.empty() || commit->message.find(line) == std::string::npos)
            return false;
    }
    return true;
}

std::optional<ObjectId> find_squash_commit(const PullRequest& pull,
                                           const Repository& repo) {
    std::vector<ObjectId> matches;
    for (const auto& id : repo.all_commits())
        if (matches_squash_signature(repo, id, pull))
            matches.push_back(id);

    if (matches.size() == 1)
        return matches.front();
    // Ambiguity is resolved by the forge-reported resolving commit if it is
    // among the matches.
    if (matches.size() > 1 && pull.merge_commit) {
        if (std::find(matches.begin(), matches.end(), *pull.merge_commit) !=
            matches.end())
            return *pull.merge_commit;
    }
    return std::nullopt;
}

// Rebase candidates for one inner commit: same author email and normalized
// subject. Ties prefer the closest author_time, then changed-path overlap.
std::optional<ObjectId>
match_rebased_commit(const forge::InnerCommit& inner, const Repository& repo,
                     const std::vector<ObjectId>& pool,
                     const std::set<ObjectId>& claimed) {
    std::string wanted_line = strings::normalized_first_line(inner.message);
    std::vector<ObjectId> candidates;
    for (const auto& id : pool) {
        if (claimed.contains(id))
            continue;
        auto commit = repo.commit(id);
        if (commit->author.email != inner.author_email)
            continue;
        if (strings::normalized_first_line(commit->message) != wanted_line)
            continue;
        candidates.push_back(id);
    }
    if (candidates.empty())
        return std::nullopt;
    if (candidates.size() == 1)
        return candidates.front();

    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const ObjectId& a, const ObjectId& b) {
                         auto da = std::llabs(repo.commit(a)->author_time() -
                                              inner.author_time);
                         auto db = std::llabs(repo.commit(b)->author_time() -
                                              inner.author_time);
                         if (da != db)
                             return da < db;
                         return a < b;
                     });

    // Changed-path overlap as the final discriminator.
    if (inner.files) {
        std::set<std::string> inner_paths;
        for (const auto& file : *inner.files)
            inner_paths.insert(file.path);
        auto overlap = [&](const ObjectId& id) {
            int score = 0;
            for (const auto& diff : vcs::diff_with_first_parent(repo, id))
                if (inner_paths.contains(diff.display_path()))
                    ++score;
            return score;
        };
        auto best = candidates.front();
        int best_score = overlap(best);
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            int score = overlap(candidates[i]);
            if (score > best_score) {
                best = candidates[i];
                best_score = score;
            }
        }
        return best;
    }
    return candidates.front();
}

} // namespace

MergeStrategy detect_strategy(const PullRequest& pull, const Repository& repo) {
    if (!pull.merged)
        throw NotMerged("pull request " + pull.ref.key + " is not merged");

    if (pull.merge_commit && repo.has_commit(*pull.merge_commit) &&
        repo.commit(*pull.merge_commit)->is_merge())
        return MergeStrategy::MergeCommit;

    bool all_present = !pull.inner_commits.empty();
    for (const auto& inner : pull.inner_commits)
        if (!repo.has_commit(inner.hash))
            all_present = false;
    if (all_present)
        return MergeStrategy::MergeCommit; // fast-forward, identity map

    if (pull.inner_commits.size() >= 2 && find_squash_commit(pull, repo))
        return MergeStrategy::Squash;

    std::set<ObjectId> claimed;
    auto pool = repo.all_commits();
    for (const auto& inner : pull.inner_commits) {
        if (auto matched = match_rebased_commit(inner, repo, pool, claimed))
            return MergeStrategy::Rebase;
    }

    return MergeStrategy::Unknown;
}

InnerCommitMap map_inner_commits(const PullRequest& pull, const Repository& repo,
                                 MergeStrategy strategy) {
    if (strategy == MergeStrategy::Unknown)
        throw StrategyUnknown("pull request " + pull.ref.key +
                              " has no reconstructable strategy");

    InnerCommitMap map;
    map.pr = pull.ref;
    map.strategy = strategy;

    switch (strategy) {
    case MergeStrategy::MergeCommit: {
        std::optional<ObjectId> last_present;
        for (const auto& inner : pull.inner_commits) {
            if (repo.has_commit(inner.hash)) {
                map.pairs.emplace_back(inner.hash, inner.hash);
                last_present = inner.hash;
            } else {
                map.pairs.emplace_back(inner.hash, std::nullopt);
            }
        }
        if (pull.merge_commit && repo.has_commit(*pull.merge_commit))
            map.resolving_commit = *pull.merge_commit;
        else if (last_present)
            map.resolving_commit = *last_present;
        break;
    }
    case MergeStrategy::Squash: {
        auto squash = find_squash_commit(pull, repo);
        if (!squash)
            throw StrategyUnknown("squash commit for pull request " +
                                  pull.ref.key + " not found");
        for (const auto& inner : pull.inner_commits)
            map.pairs.emplace_back(inner.hash, *squash);
        map.resolving_commit = *squash;
        break;
    }
    case MergeStrategy::Rebase: {
        std::set<ObjectId> claimed;
        auto pool = repo.all_commits();
        std::optional<ObjectId> last_matched;
        for (const auto& inner : pull.inner_commits) {
            auto matched = match_rebased_commit(inner, repo, pool, claimed);
            if (matched) {
                claimed.insert(*matched);
                last_matched = matched;
            }
            map.pairs.emplace_back(inner.hash, matched);
        }
        if (last_matched)
            map.resolving_commit = *last_matched;
        break;
    }
    case MergeStrategy::Unknown:
        break;
    }

    auto [before, after] = boundary_commits(pull, repo, map);
    map.last_before = before;
    map.first_after = after;
    return map;
}

std::pair<std::optional<ObjectId>, std::optional<ObjectId>>
boundary_commits(const PullRequest& pull, const Repository& repo,
                 const InnerCommitMap& map) {
    (void)pull;
    std::optional<ObjectId> last_before;
    std::optional<ObjectId> first_after;

    auto mapped = map.mapped_commits();
    if (mapped.empty())
        return {last_before, first_after};

    std::set<ObjectId> members(mapped.begin(), mapped.end());

    // Nearest first-parent ancestor of the PR's first mapped commit outside
    // the PR.
    ObjectId cursor = mapped.front();
    while (true) {
        auto commit = repo.commit(cursor);
        if (commit->parents.empty())
            break;
        ObjectId parent = commit->parents.front();
        if (!members.contains(parent)) {
            last_before = parent;
            break;
        }
        cursor = parent;
    }

    // Earliest mainline descendant of the resolving commit outside the PR;
    // for merge-commit integration the merge commit itself is the mainline
    // entry.
    ObjectId anchor = map.resolving_commit;
    if (map.strategy == MergeStrategy::MergeCommit && pull.merge_commit &&
        repo.has_commit(*pull.merge_commit))
        anchor = *pull.merge_commit;

    if (auto head = repo.head()) {
        auto chain = repo.first_parent_chain(*head);
        auto it = std::find(chain.begin(), chain.end(), anchor);
        if (it != chain.end()) {
            // chain runs head -> root; descendants precede the anchor.
            for (auto walk = it; walk != chain.begin();) {
                --walk;
                if (!members.contains(*walk)) {
                    first_after = *walk;
                    break;
                }
            }
        }
    }

    return {last_before, first_after};
}

std::optional<InnerCommitMap> reconstruct(const PullRequest& pull,
                                          const Repository& repo) {
    if (!pull.merged)
        return std::nullopt;
    MergeStrategy strategy = detect_strategy(pull, repo);
    if (strategy == MergeStrategy::Unknown)
        return std::nullopt;
    return map_inner_commits(pull, repo, strategy);
}

} // namespace prszz::pr
