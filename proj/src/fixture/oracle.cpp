#include "prszz/fixture/oracle.hpp"

#include "prszz/support/strings.hpp"
#include "prszz/vcs/diff.hpp"

#include <algorithm>

namespace prszz::fixture {

using vcs::ObjectId;
using vcs::Repository;

namespace {

struct Position {
    ObjectId commit;
    std::string path;
    int line;
};

// One step towards a parent that carries the line unchanged; nullopt when
// every parent saw it appear here.
std::optional<Position> pass_to_parent(const Repository& repo,
                                       const Position& pos) {
    auto commit = repo.commit(pos.commit);
    for (const auto& parent : commit->parents) {
        std::string parent_path = pos.path;
        auto parent_entry = repo.entry_at(parent, parent_path);
        if (!parent_entry) {
            for (const auto& diff : vcs::diff_commits(repo, parent, pos.commit)) {
                if (diff.change_kind == vcs::ChangeKind::Renamed &&
                    diff.new_path == pos.path) {
                    parent_path = *diff.old_path;
                    parent_entry = repo.entry_at(parent, parent_path);
                    break;
                }
            }
            if (!parent_entry)
                continue;
        }
        auto entry = repo.entry_at(pos.commit, pos.path);
        if (entry && parent_entry->id == entry->id)
            return Position{parent, parent_path, pos.line};

        auto hunks = vcs::diff_lines(repo.blob(parent_entry->id),
                                     repo.blob(entry->id));
        bool added_here = false;
        int offset = 0;
        for (const auto& hunk : hunks) {
            if (!hunk.added.empty() && pos.line >= hunk.added.front().first &&
                pos.line <= hunk.added.back().first) {
                added_here = true;
                break;
            }
            if (!hunk.added.empty()) {
                if (hunk.added.back().first < pos.line)
                    offset += static_cast<int>(hunk.added.size()) -
                              static_cast<int>(hunk.removed.size());
            } else if (hunk.new_start < pos.line) {
                offset -= static_cast<int>(hunk.removed.size());
            }
        }
        if (!added_here)
            return Position{parent, parent_path, pos.line - offset};
    }
    return std::nullopt;
}

} // namespace

namespace {

Position replay_to_origin(const Repository& repo, Position pos) {
    while (true) {
        if (repo.commit(pos.commit)->parents.empty())
            return pos;
        auto next = pass_to_parent(repo, pos);
        if (!next)
            return pos;
        pos = *next;
    }
}

// Position of the line's positional predecessor in the first parent of the
// commit that changed it, if the change replaced an existing line.
std::optional<Position> predecessor_position(const Repository& repo,
                                             const Position& pos) {
    auto commit = repo.commit(pos.commit);
    if (commit->parents.empty())
        return std::nullopt;
    const ObjectId parent = commit->parents.front();

    std::string parent_path = pos.path;
    auto parent_entry = repo.entry_at(parent, parent_path);
    if (!parent_entry) {
        for (const auto& diff : vcs::diff_commits(repo, parent, pos.commit)) {
            if (diff.change_kind == vcs::ChangeKind::Renamed &&
                diff.new_path == pos.path) {
                parent_path = *diff.old_path;
                parent_entry = repo.entry_at(parent, parent_path);
                break;
            }
        }
        if (!parent_entry)
            return std::nullopt;
    }
    auto entry = repo.entry_at(pos.commit, pos.path);
    if (!entry || parent_entry->id == entry->id)
        return std::nullopt;

    for (const auto& hunk : vcs::diff_lines(repo.blob(parent_entry->id),
                                            repo.blob(entry->id))) {
        if (hunk.added.empty())
            continue;
        if (pos.line < hunk.added.front().first ||
            pos.line > hunk.added.back().first)
            continue;
        std::size_t idx =
            static_cast<std::size_t>(pos.line - hunk.added.front().first);
        if (idx >= hunk.removed.size())
            return std::nullopt; // pure addition
        return Position{parent, parent_path, hunk.removed[idx].first};
    }
    return std::nullopt;
}

} // namespace

ObjectId replay_line_origin(const Repository& repo, const ObjectId& at,
                            const std::string& path, int line) {
    return replay_to_origin(repo, {at, path, line}).commit;
}

std::vector<ObjectId> replay_line_lineage(const Repository& repo,
                                          const ObjectId& at,
                                          const std::string& path, int line) {
    std::vector<ObjectId> lineage;
    Position pos{at, path, line};
    for (int depth = 0; depth < 1024; ++depth) {
        Position origin = replay_to_origin(repo, pos);
        lineage.push_back(origin.commit);
        auto predecessor = predecessor_position(repo, origin);
        if (!predecessor)
            break;
        pos = *predecessor;
    }
    return lineage;
}

std::set<ObjectId> replay_suspects(const Repository& repo, const ObjectId& base,
                                   const ObjectId& fix, bool method_trace,
                                   const lang::ProfileRegistry* profiles,
                                   int window, bool deep) {
    std::set<ObjectId> suspects;
    for (const auto& diff : vcs::diff_commits(repo, base, fix)) {
        if (!diff.old_path || diff.change_kind == vcs::ChangeKind::MetaOnly)
            continue;
        const std::string& path = *diff.old_path;

        std::set<int> lines;
        for (const auto& hunk : diff.hunks) {
            for (const auto& [line, text] : hunk.removed)
                lines.insert(line);
            if (method_trace && hunk.removed.empty() && !hunk.added.empty()) {
                auto content = repo.file_at(base, path);
                int count =
                    static_cast<int>(strings::split_lines(content).size());
                if (count == 0)
                    continue;
                int anchor = std::clamp(hunk.old_start, 1, count);
                const lang::LanguageProfile* profile =
                    profiles != nullptr ? profiles->for_path(path) : nullptr;
                std::optional<lang::MethodSpan> span;
                if (profile != nullptr)
                    span = lang::enclosing_method_span(content, anchor, *profile);
                int start = span ? span->start_line : std::max(1, anchor - window);
                int end = span ? span->end_line : std::min(count, anchor + window);
                for (int line = start; line <= end; ++line)
                    lines.insert(line);
            }
        }
        for (int line : lines) {
            if (deep) {
                for (const auto& id : replay_line_lineage(repo, base, path, line))
                    suspects.insert(id);
            } else {
                suspects.insert(replay_line_origin(repo, base, path, line));
            }
        }
    }
    return suspects;
}

} // namespace prszz::fixture
