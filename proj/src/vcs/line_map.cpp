#include "prszz/vcs/line_map.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"
#include "prszz/vcs/diff.hpp"

#include <deque>
#include <unordered_map>

namespace prszz::vcs {

namespace {

// BFS over parents, visiting earlier parents first; reconstructs the
// commit chain from -> ... -> to.
std::vector<ObjectId> parent_path(const Repository& repo, const ObjectId& from,
                                  const ObjectId& to) {
    if (from == to)
        return {from};

    std::unordered_map<ObjectId, ObjectId, ObjectIdHash> predecessor;
    std::deque<ObjectId> frontier{from};
    predecessor.emplace(from, from);

    while (!frontier.empty()) {
        ObjectId cur = frontier.front();
        frontier.pop_front();
        for (const auto& parent : repo.commit(cur)->parents) {
            if (predecessor.contains(parent))
                continue;
            predecessor.emplace(parent, cur);
            if (parent == to) {
                std::vector<ObjectId> chain{to};
                ObjectId walk = cur;
                while (walk != from) {
                    chain.push_back(walk);
                    walk = predecessor.at(walk);
                }
                chain.push_back(from);
                std::reverse(chain.begin(), chain.end());
                return chain;
            }
            frontier.push_back(parent);
        }
    }
    throw UnknownCommit(to.hex() + " is not an ancestor of " + from.hex());
}

} // namespace

std::optional<MappedLine> map_line_across(const Repository& repo,
                                          const ObjectId& from,
                                          const ObjectId& to,
                                          const std::string& path, int line) {
    // Validate the line exists at `from`.
    std::string content = repo.file_at(from, path);
    int line_count = static_cast<int>(strings::split_lines(content).size());
    if (line < 1 || line > line_count)
        throw LineOutOfRange("line " + std::to_string(line) + " of " + path +
                             " at " + from.hex());

    auto chain = parent_path(repo, from, to);

    std::string cur_path = path;
    int cur_line = line;
    // chain[0] = from ... chain.back() = to; each step goes child -> parent.
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const ObjectId& child = chain[i];
        const ObjectId& parent = chain[i + 1];

        auto child_entry = repo.entry_at(child, cur_path);
        if (!child_entry)
            throw PathNotPresent(cur_path + " not present at " + child.hex());

        std::string parent_path_name = cur_path;
        auto parent_entry = repo.entry_at(parent, parent_path_name);
        if (!parent_entry) {
            // Renamed or newly added relative to this parent.
            std::optional<std::string> source;
            for (const auto& diff : diff_commits(repo, parent, child)) {
                if (diff.change_kind == ChangeKind::Renamed &&
                    diff.new_path == cur_path) {
                    source = diff.old_path;
                    break;
                }
            }
            if (!source)
                return std::nullopt; // file (and line) did not exist at parent
            parent_path_name = *source;
            parent_entry = repo.entry_at(parent, parent_path_name);
            if (!parent_entry)
                return std::nullopt;
        }

        if (parent_entry->id != child_entry->id) {
            auto hunks = diff_lines(repo.blob(parent_entry->id),
                                    repo.blob(child_entry->id));
            bool vanished = false;
            for (const auto& hunk : hunks) {
                if (hunk.added.empty())
                    continue;
                if (cur_line >= hunk.added.front().first &&
                    cur_line <= hunk.added.back().first) {
                    vanished = true;
                    break;
                }
            }
            if (vanished)
                return std::nullopt;

            int offset = 0;
            for (const auto& hunk : hunks) {
                if (!hunk.added.empty()) {
                    if (hunk.added.back().first < cur_line)
                        offset += static_cast<int>(hunk.added.size()) -
                                  static_cast<int>(hunk.removed.size());
                } else if (hunk.new_start < cur_line) {
                    offset -= static_cast<int>(hunk.removed.size());
                }
            }
            cur_line -= offset;
        }
        cur_path = parent_path_name;
    }

    return MappedLine{cur_path, cur_line};
}

} // namespace prszz::vcs
