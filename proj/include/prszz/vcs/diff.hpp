#pragma once

#include "prszz/vcs/repository.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prszz::vcs {

// One change region. Context lines never appear. `removed` line numbers are
// consecutive in the old file starting at old_start; `added` likewise in the
// new file from new_start. For a pure insertion, old_start anchors the old
// line after which the text was inserted (0 = top of file); symmetrically
// new_start anchors pure deletions.
struct Hunk {
    int old_start = 0;
    std::vector<std::pair<int, std::string>> removed;
    int new_start = 0;
    std::vector<std::pair<int, std::string>> added;
};

enum class ChangeKind { Added, Deleted, Modified, Renamed, MetaOnly };

std::string_view change_kind_name(ChangeKind kind);

struct FileDiff {
    std::optional<std::string> old_path; // absent: file added
    std::optional<std::string> new_path; // absent: file deleted
    ChangeKind change_kind = ChangeKind::Modified;
    std::vector<Hunk> hunks;
    std::uint32_t old_mode = 0;
    std::uint32_t new_mode = 0;

    const std::string& display_path() const {
        return new_path ? *new_path : *old_path;
    }
    std::size_t changed_lines() const;
};

// Rename detection threshold: pairs scoring at least this similarity are
// reported as renames.
inline constexpr double kRenameThreshold = 0.5;

bool is_binary(std::string_view content);

// Line-multiset overlap in [0, 1].
double content_similarity(std::string_view a, std::string_view b);

// Myers line diff.
std::vector<Hunk> diff_lines(std::string_view old_text, std::string_view new_text);

// Tree-to-tree diff with rename detection; deterministic, sorted by path.
std::vector<FileDiff> diff_commits(const Repository& repo, const ObjectId& base,
                                   const ObjectId& target);

// Diff against the first parent; a root commit is diffed against the empty
// tree.
std::vector<FileDiff> diff_with_first_parent(const Repository& repo,
                                             const ObjectId& commit_id);

// True iff the commit is a merge or all of its first-parent file diffs are
// MetaOnly (an empty commit counts: nothing content-bearing changed).
bool is_meta_change(const Repository& repo, const ObjectId& commit_id);

} // namespace prszz::vcs
