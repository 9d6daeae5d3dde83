#pragma once

#include "prszz/vcs/repository.hpp"

#include <string>
#include <vector>

namespace prszz::vcs {

struct LineOrigin {
    std::string path;       // path as requested, at the blamed revision
    int line = 0;           // requested 1-based line number
    ObjectId origin_commit; // last commit that changed the line
    int origin_line = 0;    // 1-based line number at the origin commit
    std::string origin_path; // path at the origin commit (renames tracked)
};

// Blame of every line of `path` as it exists at `at`; element i describes
// line i+1. Renames are followed; for merge commits blame passes to parents
// in order, earlier parents claiming unchanged lines first.
std::vector<LineOrigin> blame_file(const Repository& repo, const ObjectId& at,
                                   const std::string& path);

// Blame of a subset of lines. Throws UnknownCommit / PathNotPresent /
// LineOutOfRange. Result sorted by requested line.
std::vector<LineOrigin> blame_lines(const Repository& repo, const ObjectId& at,
                                    const std::string& path,
                                    const std::vector<int>& lines);

} // namespace prszz::vcs
