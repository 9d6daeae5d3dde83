#pragma once

#include "prszz/vcs/repository.hpp"

#include <optional>
#include <string>

namespace prszz::vcs {

struct MappedLine {
    std::string path;
    int line = 0;
};

// Tracks the physical line (path, line) at `from` back to the ancestor
// revision `to`, stepping through each commit's diff (insertions, deletions,
// renames). Returns nullopt when the line did not exist at `to` (Vanished).
// The walk follows a deterministic shortest parent path preferring earlier
// parents.
std::optional<MappedLine> map_line_across(const Repository& repo,
                                          const ObjectId& from,
                                          const ObjectId& to,
                                          const std::string& path, int line);

} // namespace prszz::vcs
