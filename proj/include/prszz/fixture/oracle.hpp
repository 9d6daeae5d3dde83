#pragma once

#include "prszz/lang/profile.hpp"
#include "prszz/vcs/repository.hpp"

#include <optional>
#include <set>
#include <string>

namespace prszz::fixture {

// Brute-force per-line replay: walks one line backwards through history one
// commit at a time (parents claim unchanged lines in order) until the commit
// that introduced it. Deliberately independent of the blame implementation's
// suspect-queue algorithm; used to verify generated fixtures and as the
// acceptance oracle.
vcs::ObjectId replay_line_origin(const vcs::Repository& repo,
                                 const vcs::ObjectId& at,
                                 const std::string& path, int line);

// Every commit on a line's edit lineage: the replay origin, then the origin
// of its positional predecessor, and so on until a commit introduced the
// line with no counterpart. Element 0 is the replay origin.
std::vector<vcs::ObjectId> replay_line_lineage(const vcs::Repository& repo,
                                               const vcs::ObjectId& at,
                                               const std::string& path,
                                               int line);

// Suspect set of the removed lines of diff(base, fix), each traced by
// replay. With method_trace, added-only hunks contribute the enclosing
// method span (or a +-window fallback) at the base. With deep, the full
// edit lineage of every line is included (used to verify declared fixture
// truths that sit behind cosmetic or meta edits).
std::set<vcs::ObjectId>
replay_suspects(const vcs::Repository& repo, const vcs::ObjectId& base,
                const vcs::ObjectId& fix, bool method_trace = false,
                const lang::ProfileRegistry* profiles = nullptr,
                int window = 25, bool deep = false);

} // namespace prszz::fixture
