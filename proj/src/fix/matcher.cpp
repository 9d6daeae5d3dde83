#include "prszz/fix/matcher.hpp"

#include "prszz/links/patterns.hpp"
#include "prszz/support/parallel.hpp"
#include "prszz/support/strings.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace prszz::fix {

using forge::IssueRef;
using forge::PullRequest;
using forge::System;
using links::DistinctBug;
using links::LinkGraph;
using links::NodeKey;
using vcs::ObjectId;
using vcs::Repository;

std::string_view route_name(MatchRoute route) {
    switch (route) {
    case MatchRoute::PrLink: return "pr_link";
    case MatchRoute::MessageMatch: return "message_match";
    case MatchRoute::None: return "none";
    }
    return "none";
}

namespace {

bool ref_matches_alias(const IssueRef& extracted, const IssueRef& alias) {
    if (extracted.system == System::JiraIssue)
        return alias.system == System::JiraIssue && alias.key == extracted.key;
    // GitHub numbers share one space between issues and pull requests.
    return (alias.system == System::GithubIssue ||
            alias.system == System::PullRequest) &&
           alias.key == extracted.key;
}

bool text_mentions_bug(const std::string& text, const DistinctBug& bug,
                       const MatcherOptions& options) {
    auto refs = links::extract_text_links(text, System::GithubIssue,
                                          options.project_keys, options.patterns);
    for (const auto& ref : refs)
        for (const auto& alias : bug.aliases)
            if (ref_matches_alias(ref, alias))
                return true;
    return false;
}

bool edge_between(const LinkGraph& graph, const NodeKey& from, const NodeKey& to) {
    for (const auto* edge : graph.edges_from(from))
        if (edge->dst == to)
            return true;
    return false;
}

std::int64_t closed_or_created(std::optional<std::int64_t> closed,
                               std::int64_t created) {
    return closed.value_or(created);
}

std::int64_t time_distance(const DistinctBug& bug, const PullRequest& pr) {
    const auto& ticket = bug.merged_ticket;
    std::int64_t d_created = std::llabs(pr.created_at - ticket.created_at);
    std::int64_t d_closed =
        std::llabs(closed_or_created(pr.closed_at, pr.created_at) -
                   closed_or_created(ticket.closed_at, ticket.created_at));
    return d_created + d_closed;
}

bool assignees_match(const std::optional<std::string>& a,
                     const std::optional<std::string>& b) {
    return a && b && !a->empty() && strings::iequals(*a, *b);
}

int pr_number_of(const PullRequest& pr) {
    return std::atoi(pr.ref.key.c_str());
}

} // namespace

ConfidenceScore
score_fixing_pr(const DistinctBug& bug, const PullRequest& pr,
                const LinkGraph& graph,
                const std::vector<const PullRequest*>& candidates) {
    ConfidenceScore score;
    NodeKey pr_node = NodeKey::issue(pr.ref);

    bool pr_to_bug = false;
    bool bug_to_pr = false;
    for (const auto& alias : bug.aliases) {
        NodeKey alias_node = NodeKey::issue(alias);
        pr_to_bug = pr_to_bug || edge_between(graph, pr_node, alias_node);
        bug_to_pr = bug_to_pr || edge_between(graph, alias_node, pr_node);
    }
    if (pr_to_bug)
        score.grant("pr_links_bug");
    if (bug_to_pr)
        score.grant("bug_links_pr");

    if (assignees_match(bug.merged_ticket.assignee, pr.assignee))
        score.grant("assignee_match");

    if (candidates.size() <= 1) {
        score.grant("time_proximity");
    } else {
        std::int64_t own = time_distance(bug, pr);
        bool nearest = true;
        for (const auto* other : candidates)
            if (time_distance(bug, *other) < own)
                nearest = false;
        if (nearest)
            score.grant("time_proximity");
    }
    return score;
}

const PullRequest*
select_fixing_pr(const DistinctBug& bug,
                 const std::vector<const PullRequest*>& candidates,
                 const LinkGraph& graph) {
    if (candidates.empty())
        return nullptr;
    if (candidates.size() == 1)
        return candidates.front();

    const PullRequest* best = nullptr;
    int best_value = -1;
    std::int64_t bug_closed = closed_or_created(bug.merged_ticket.closed_at,
                                                bug.merged_ticket.created_at);

    auto better_tie = [&](const PullRequest* challenger, const PullRequest* champ) {
        std::int64_t dc = std::llabs(
            closed_or_created(challenger->closed_at, challenger->created_at) -
            bug_closed);
        std::int64_t db = std::llabs(
            closed_or_created(champ->closed_at, champ->created_at) - bug_closed);
        if (dc != db)
            return dc < db;
        return pr_number_of(*challenger) < pr_number_of(*champ);
    };

    for (const auto* candidate : candidates) {
        int value = score_fixing_pr(bug, *candidate, graph, candidates).value;
        if (value > best_value ||
            (value == best_value && better_tie(candidate, best))) {
            best = candidate;
            best_value = value;
        }
    }
    return best;
}

std::optional<ObjectId>
select_fixing_commit(const DistinctBug& bug,
                     const std::vector<ObjectId>& candidates,
                     const Repository& repo,
                     const std::set<std::string>& project_keys) {
    if (candidates.empty())
        return std::nullopt;
    if (candidates.size() == 1)
        return candidates.front();

    MatcherOptions options;
    options.project_keys = project_keys;

    std::int64_t bug_closed = closed_or_created(bug.merged_ticket.closed_at,
                                                bug.merged_ticket.created_at);

    // "Most recent before the bug closed" goes to the newest candidate not
    // past the closing time.
    std::optional<ObjectId> most_recent_before;
    std::int64_t best_time = std::numeric_limits<std::int64_t>::min();
    for (const auto& id : candidates) {
        auto commit = repo.commit(id);
        if (commit->commit_time() <= bug_closed &&
            commit->commit_time() > best_time) {
            best_time = commit->commit_time();
            most_recent_before = id;
        }
    }

    ObjectId best;
    int best_score = -1;
    bool have_best = false;
    for (const auto& id : candidates) {
        auto commit = repo.commit(id);
        int score = 0;
        if (bug.merged_ticket.assignee &&
            (assignees_match(bug.merged_ticket.assignee, commit->author.name) ||
             assignees_match(bug.merged_ticket.assignee, commit->author.email)))
            ++score;
        if (text_mentions_bug(commit->message, bug, options))
            ++score;
        if (most_recent_before && *most_recent_before == id)
            ++score;

        if (!have_best) {
            best = id;
            best_score = score;
            have_best = true;
            continue;
        }
        auto champ = repo.commit(best);
        bool wins = score > best_score;
        if (score == best_score) {
            if (commit->commit_time() != champ->commit_time())
                wins = commit->commit_time() > champ->commit_time();
            else
                wins = id < best;
        }
        if (wins) {
            best = id;
            best_score = score;
        }
    }
    return best;
}

namespace {

// Commits whose message references any alias of the bug; repo order
// (newest first) kept for determinism.
std::vector<ObjectId> message_matched_commits(const DistinctBug& bug,
                                              const Repository& repo,
                                              const MatcherOptions& options) {
    std::vector<ObjectId> matched;
    for (const auto& id : repo.all_commits()) {
        if (text_mentions_bug(repo.commit(id)->message, bug, options))
            matched.push_back(id);
    }
    return matched;
}

} // namespace

std::vector<FixRecord>
match_all_fixes(const std::vector<DistinctBug>& bugs,
                const forge::Snapshot& snapshot, const Repository& repo,
                const LinkGraph& graph,
                const std::map<std::string, pr::InnerCommitMap>& inner_maps,
                const MatcherOptions& options) {
    std::vector<FixRecord> records(bugs.size());

    parallel::parallel_for(bugs.size(), options.jobs, [&](std::size_t index) {
        const DistinctBug& bug = bugs[index];
        FixRecord record;
        record.bug = bug.canonical;

        // Pull requests linked to any alias, either direction.
        std::set<std::string> linked_keys;
        for (const auto& alias : bug.aliases) {
            if (alias.system == System::PullRequest)
                linked_keys.insert(alias.key); // the bug itself is a PR
            NodeKey node = NodeKey::issue(alias);
            for (const auto* edge : graph.edges_from(node))
                if (!edge->dst.is_commit &&
                    edge->dst.ref.system == System::PullRequest)
                    linked_keys.insert(edge->dst.ref.key);
            for (const auto* edge : graph.edges_to(node))
                if (!edge->src.is_commit &&
                    edge->src.ref.system == System::PullRequest)
                    linked_keys.insert(edge->src.ref.key);
        }

        std::vector<const PullRequest*> linked;
        std::vector<const PullRequest*> merged;
        for (const auto& key : linked_keys) {
            if (const auto* pull = snapshot.find_pull(key)) {
                linked.push_back(pull);
                if (pull->merged)
                    merged.push_back(pull);
            }
        }

        if (!merged.empty()) {
            const PullRequest* pull = select_fixing_pr(bug, merged, graph);
            record.via = MatchRoute::PrLink;
            record.fixing_pr = pull->ref;
            record.score = score_fixing_pr(bug, *pull, graph, merged);

            auto map_it = inner_maps.find(pull->ref.key);
            if (map_it != inner_maps.end()) {
                record.fixing_commit = select_fixing_commit(
                    bug, map_it->second.mapped_commits(), repo,
                    options.project_keys);
            }
            records[index] = std::move(record);
            return;
        }
        if (!linked.empty()) {
            // Only unmerged PRs are linked: nothing entered the history.
            record.via = MatchRoute::None;
            records[index] = std::move(record);
            return;
        }

        auto matched = message_matched_commits(bug, repo, options);
        if (!matched.empty()) {
            record.via = MatchRoute::MessageMatch;
            record.fixing_commit =
                select_fixing_commit(bug, matched, repo, options.project_keys);
            ConfidenceScore score;
            score.grant("message_mentions_bug");
            if (record.fixing_commit) {
                auto commit = repo.commit(*record.fixing_commit);
                if (bug.merged_ticket.assignee &&
                    (assignees_match(bug.merged_ticket.assignee,
                                     commit->author.name) ||
                     assignees_match(bug.merged_ticket.assignee,
                                     commit->author.email)))
                    score.grant("author_is_assignee");
            }
            record.score = std::move(score);
        }
        records[index] = std::move(record);
    });
    return records;
}

std::vector<FixRecord>
match_all_fixes_bszz(const std::vector<DistinctBug>& bugs, const Repository& repo,
                     const MatcherOptions& options) {
    std::vector<FixRecord> records(bugs.size());

    parallel::parallel_for(bugs.size(), options.jobs, [&](std::size_t index) {
        const DistinctBug& bug = bugs[index];
        FixRecord record;
        record.bug = bug.canonical;

        auto matched = message_matched_commits(bug, repo, options);
        if (!matched.empty()) {
            record.via = MatchRoute::MessageMatch;
            // The newest potentially fixing commit wins.
            ObjectId newest = matched.front();
            for (const auto& id : matched) {
                auto commit = repo.commit(id);
                auto champ = repo.commit(newest);
                if (commit->commit_time() > champ->commit_time() ||
                    (commit->commit_time() == champ->commit_time() && id < newest))
                    newest = id;
            }
            record.fixing_commit = newest;

            ConfidenceScore score;
            score.grant("message_mentions_bug");
            auto commit = repo.commit(newest);
            if (bug.merged_ticket.assignee &&
                (assignees_match(bug.merged_ticket.assignee, commit->author.name) ||
                 assignees_match(bug.merged_ticket.assignee, commit->author.email)))
                score.grant("author_is_assignee");
            record.score = std::move(score);
        }
        records[index] = std::move(record);
    });
    return records;
}

} // namespace prszz::fix
