#include "prszz/links/dedup.hpp"

#include "prszz/support/strings.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace prszz::links {

using forge::BugCarrier;
using forge::IssueRef;

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool is_duplicate_kind(const std::string& kind) {
    return strings::iequals(kind, "duplicate") ||
           strings::iequals(kind, "duplicates") ||
           strings::iequals(kind, "is duplicated by");
}

forge::IssueTicket as_ticket(const BugCarrier& carrier) {
    if (carrier.issue != nullptr)
        return *carrier.issue;
    const auto& pull = *carrier.pull;
    forge::IssueTicket ticket;
    ticket.ref = pull.ref;
    ticket.title = pull.title;
    ticket.description = pull.description;
    ticket.labels = pull.labels;
    ticket.status = "Closed";
    ticket.created_at = pull.created_at;
    ticket.closed_at = pull.closed_at;
    ticket.assignee = pull.assignee;
    ticket.comments = pull.comments;
    ticket.integrated_links = pull.integrated_links;
    return ticket;
}

} // namespace

std::vector<DistinctBug>
merge_duplicate_bugs(const std::vector<BugCarrier>& bugs, const LinkGraph& graph) {
    std::map<IssueRef, std::size_t> index;
    for (std::size_t i = 0; i < bugs.size(); ++i)
        index.emplace(bugs[i].ref, i);

    UnionFind components(bugs.size());
    for (const auto& edge : graph.edges()) {
        if (edge.src.is_commit || edge.dst.is_commit)
            continue;
        auto src = index.find(edge.src.ref);
        auto dst = index.find(edge.dst.ref);
        if (src == index.end() || dst == index.end())
            continue; // merging applies to selected bugs only

        bool eligible = false;
        if (is_duplicate_kind(edge.kind)) {
            eligible = true;
        } else if (edge.provenance == Provenance::Integrated ||
                   edge.provenance == Provenance::Mention) {
            eligible = edge.src.ref.system != edge.dst.ref.system;
        }
        if (eligible)
            components.unite(src->second, dst->second);
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < bugs.size(); ++i)
        groups[components.find(i)].push_back(i);

    std::vector<DistinctBug> out;
    for (auto& [root, member_ids] : groups) {
        // Canonical member: earliest created_at, ties by lexicographic key.
        std::sort(member_ids.begin(), member_ids.end(),
                  [&](std::size_t a, std::size_t b) {
                      auto ta = bugs[a].created_at();
                      auto tb = bugs[b].created_at();
                      if (ta != tb)
                          return ta < tb;
                      return bugs[a].ref.key < bugs[b].ref.key;
                  });

        DistinctBug bug;
        bug.canonical = bugs[member_ids.front()].ref;
        bug.merged_ticket = as_ticket(bugs[member_ids.front()]);

        for (std::size_t id : member_ids) {
            const BugCarrier& member = bugs[id];
            bug.aliases.insert(member.ref);
            bug.members.push_back(member);
            if (member.ref == bug.canonical)
                continue;

            auto ticket = as_ticket(member);
            bug.merged_ticket.labels.insert(ticket.labels.begin(),
                                            ticket.labels.end());
            if (ticket.closed_at &&
                (!bug.merged_ticket.closed_at ||
                 *ticket.closed_at > *bug.merged_ticket.closed_at))
                bug.merged_ticket.closed_at = ticket.closed_at;
            if (!bug.merged_ticket.assignee && ticket.assignee)
                bug.merged_ticket.assignee = ticket.assignee;
            bug.merged_ticket.comments.insert(bug.merged_ticket.comments.end(),
                                              ticket.comments.begin(),
                                              ticket.comments.end());
            for (const auto& link : ticket.integrated_links) {
                auto same = [&](const forge::IntegratedLink& existing) {
                    return existing.target == link.target &&
                           existing.kind == link.kind;
                };
                if (std::none_of(bug.merged_ticket.integrated_links.begin(),
                                 bug.merged_ticket.integrated_links.end(), same))
                    bug.merged_ticket.integrated_links.push_back(link);
            }
        }

        std::stable_sort(bug.merged_ticket.comments.begin(),
                         bug.merged_ticket.comments.end(),
                         [](const forge::Comment& a, const forge::Comment& b) {
                             return a.time < b.time;
                         });
        out.push_back(std::move(bug));
    }

    std::sort(out.begin(), out.end(), [](const DistinctBug& a, const DistinctBug& b) {
        return a.canonical < b.canonical;
    });
    return out;
}

} // namespace prszz::links
