#pragma once

#include "prszz/forge/bugs.hpp"
#include "prszz/links/graph.hpp"

#include <set>
#include <vector>

namespace prszz::links {

// One real-world defect, possibly reported in several trackers.
struct DistinctBug {
    forge::IssueRef canonical; // earliest created_at, ties by key
    std::set<forge::IssueRef> aliases; // every member, canonical included
    forge::IssueTicket merged_ticket;  // field union over members
    std::vector<forge::BugCarrier> members;

    bool has_alias(const forge::IssueRef& ref) const {
        return aliases.contains(ref);
    }
};

// Connected components over merge-eligible edges: Integrated/Mention edges
// between bug-labeled tickets in different trackers, or any edge whose
// link_kind is "duplicate"/"duplicates". Alias sets partition the input.
std::vector<DistinctBug>
merge_duplicate_bugs(const std::vector<forge::BugCarrier>& bugs,
                     const LinkGraph& graph);

} // namespace prszz::links
