#include "prszz/vcs/blame.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"
#include "prszz/vcs/diff.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace prszz::vcs {

namespace {

// True when `line` (new-file numbering) lies in an added region.
bool is_added_line(int line, const std::vector<Hunk>& hunks) {
    for (const auto& hunk : hunks) {
        if (hunk.added.empty())
            continue;
        if (line >= hunk.added.front().first && line <= hunk.added.back().first)
            return true;
    }
    return false;
}

// Maps a kept line from new-file numbering to old-file numbering.
int map_to_old_line(int line, const std::vector<Hunk>& hunks) {
    int offset = 0;
    for (const auto& hunk : hunks) {
        if (!hunk.added.empty()) {
            if (hunk.added.back().first < line)
                offset += static_cast<int>(hunk.added.size()) -
                          static_cast<int>(hunk.removed.size());
        } else if (hunk.new_start < line) {
            offset -= static_cast<int>(hunk.removed.size());
        }
    }
    return line - offset;
}

// Rename source of `path` between a parent and child commit, if any.
std::optional<std::string> rename_source(const Repository& repo,
                                         const ObjectId& parent,
                                         const ObjectId& child,
                                         const std::string& path) {
    for (const auto& diff : diff_commits(repo, parent, child)) {
        if (diff.change_kind == ChangeKind::Renamed && diff.new_path == path)
            return diff.old_path;
    }
    return std::nullopt;
}

} // namespace

std::vector<LineOrigin> blame_file(const Repository& repo, const ObjectId& at,
                                   const std::string& path) {
    std::string content = repo.file_at(at, path);
    const int line_count =
        static_cast<int>(strings::split_lines(content).size());

    std::vector<LineOrigin> result(static_cast<std::size_t>(line_count));
    for (int i = 0; i < line_count; ++i) {
        result[static_cast<std::size_t>(i)].path = path;
        result[static_cast<std::size_t>(i)].line = i + 1;
    }
    if (line_count == 0)
        return result;

    // Pending blame jobs: commit -> path at that commit -> (line -> result slot).
    using LineMap = std::map<int, int>;
    std::unordered_map<ObjectId, std::map<std::string, LineMap>, ObjectIdHash> work;
    // Newest-first processing so jobs flowing into a commit from all its
    // descendants coalesce before it is handled.
    std::set<std::pair<std::int64_t, ObjectId>> queue;

    auto enqueue = [&](const ObjectId& id) {
        queue.insert({repo.commit(id)->commit_time(), id});
    };

    auto& seed = work[at][path];
    for (int i = 1; i <= line_count; ++i)
        seed[i] = i - 1;
    enqueue(at);

    while (!queue.empty()) {
        auto top = *queue.rbegin();
        queue.erase(std::prev(queue.end()));
        const ObjectId current = top.second;

        auto work_it = work.find(current);
        if (work_it == work.end())
            continue;
        auto jobs = std::move(work_it->second);
        work.erase(work_it);

        auto commit = repo.commit(current);

        for (auto& [cur_path, linemap] : jobs) {
            auto finalize = [&](const LineMap& lines) {
                for (const auto& [line, slot] : lines) {
                    auto& origin = result[static_cast<std::size_t>(slot)];
                    origin.origin_commit = current;
                    origin.origin_line = line;
                    origin.origin_path = cur_path;
                }
            };

            if (commit->parents.empty()) {
                finalize(linemap);
                continue;
            }

            auto cur_entry = repo.entry_at(current, cur_path);
            if (!cur_entry) {
                finalize(linemap); // jobs only target commits carrying the path
                continue;
            }

            LineMap remaining = std::move(linemap);
            for (const auto& parent : commit->parents) {
                if (remaining.empty())
                    break;

                std::string parent_path = cur_path;
                auto parent_entry = repo.entry_at(parent, parent_path);
                if (!parent_entry) {
                    auto source = rename_source(repo, parent, current, cur_path);
                    if (!source)
                        continue; // path born relative to this parent
                    parent_path = *source;
                    parent_entry = repo.entry_at(parent, parent_path);
                    if (!parent_entry)
                        continue;
                }

                if (parent_entry->id == cur_entry->id) {
                    auto& target = work[parent][parent_path];
                    for (const auto& [line, slot] : remaining)
                        target[line] = slot;
                    remaining.clear();
                    enqueue(parent);
                    continue;
                }

                auto hunks = diff_lines(repo.blob(parent_entry->id),
                                        repo.blob(cur_entry->id));
                LineMap still_here;
                bool passed_any = false;
                for (const auto& [line, slot] : remaining) {
                    if (is_added_line(line, hunks)) {
                        still_here[line] = slot;
                        continue;
                    }
                    work[parent][parent_path][map_to_old_line(line, hunks)] = slot;
                    passed_any = true;
                }
                if (passed_any)
                    enqueue(parent);
                remaining = std::move(still_here);
            }

            finalize(remaining);
        }
    }

    return result;
}

std::vector<LineOrigin> blame_lines(const Repository& repo, const ObjectId& at,
                                    const std::string& path,
                                    const std::vector<int>& lines) {
    auto full = blame_file(repo, at, path);
    std::vector<int> wanted(lines);
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    std::vector<LineOrigin> out;
    out.reserve(wanted.size());
    for (int line : wanted) {
        if (line < 1 || line > static_cast<int>(full.size()))
            throw LineOutOfRange("line " + std::to_string(line) + " of " + path +
                                 " at " + at.hex());
        out.push_back(full[static_cast<std::size_t>(line - 1)]);
    }
    return out;
}

} // namespace prszz::vcs
