#include "prszz/vcs/diff.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace prszz::vcs {

std::string_view change_kind_name(ChangeKind kind) {
    switch (kind) {
    case ChangeKind::Added: return "Added";
    case ChangeKind::Deleted: return "Deleted";
    case ChangeKind::Modified: return "Modified";
    case ChangeKind::Renamed: return "Renamed";
    case ChangeKind::MetaOnly: return "MetaOnly";
    }
    return "Unknown";
}

std::size_t FileDiff::changed_lines() const {
    std::size_t n = 0;
    for (const auto& hunk : hunks)
        n += hunk.removed.size() + hunk.added.size();
    return n;
}

bool is_binary(std::string_view content) {
    auto probe = content.substr(0, 8000);
    return probe.find('\0') != std::string_view::npos;
}

double content_similarity(std::string_view a, std::string_view b) {
    auto lines_a = strings::split_lines(a);
    auto lines_b = strings::split_lines(b);
    if (lines_a.empty() && lines_b.empty())
        return 1.0;

    std::unordered_map<std::string_view, int> counts;
    for (auto line : lines_a)
        ++counts[line];
    std::size_t common = 0;
    for (auto line : lines_b) {
        auto it = counts.find(line);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    return 2.0 * static_cast<double>(common) /
           static_cast<double>(lines_a.size() + lines_b.size());
}

namespace {

// Interns lines to ints so the Myers loop compares integers.
std::vector<int> intern_lines(const std::vector<std::string_view>& lines,
                              std::unordered_map<std::string_view, int>& table) {
    std::vector<int> out;
    out.reserve(lines.size());
    for (auto line : lines) {
        auto [it, inserted] =
            table.emplace(line, static_cast<int>(table.size()));
        out.push_back(it->second);
    }
    return out;
}

// Myers O(ND) shortest edit script. Returns, per old index, whether the line
// was kept, and a map of kept old index -> new index.
struct EditScript {
    std::vector<bool> old_kept;
    std::vector<bool> new_kept;
    std::vector<std::pair<int, int>> matches; // (old idx, new idx), ascending
};

EditScript myers_diff(const std::vector<int>& a, const std::vector<int>& b) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    EditScript script;
    script.old_kept.assign(a.size(), false);
    script.new_kept.assign(b.size(), false);

    // Strip common prefix/suffix to keep the trace small.
    int prefix = 0;
    while (prefix < n && prefix < m && a[prefix] == b[prefix])
        ++prefix;
    int suffix = 0;
    while (suffix < n - prefix && suffix < m - prefix &&
           a[n - 1 - suffix] == b[m - 1 - suffix])
        ++suffix;

    for (int i = 0; i < prefix; ++i)
        script.matches.emplace_back(i, i);

    const int cn = n - prefix - suffix;
    const int cm = m - prefix - suffix;
    const int off_a = prefix;
    const int off_b = prefix;

    if (cn > 0 && cm > 0) {
        // Edit distance is capped; beyond it the changed region degrades to
        // a full replacement (bounded memory on massive rewrites).
        const int max_d = std::min(cn + cm, 4096);
        std::vector<std::vector<int>> trace;
        std::vector<int> v(2 * max_d + 1, 0);
        const int offset = max_d;
        bool found = false;

        for (int d = 0; d <= max_d && !found; ++d) {
            for (int k = -d; k <= d; k += 2) {
                int x;
                if (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1]))
                    x = v[offset + k + 1];
                else
                    x = v[offset + k - 1] + 1;
                int y = x - k;
                while (x < cn && y < cm && a[off_a + x] == b[off_b + y]) {
                    ++x;
                    ++y;
                }
                v[offset + k] = x;
                if (x >= cn && y >= cm) {
                    found = true;
                    break;
                }
            }
            trace.push_back(v);
        }

        if (found) {
            // Backtrack to recover matches.
            int x = cn, y = cm;
            std::vector<std::pair<int, int>> rev_matches;
            for (int d = static_cast<int>(trace.size()) - 1;
                 d >= 0 && (x > 0 || y > 0); --d) {
                const auto& vd = trace[static_cast<std::size_t>(d)];
                int k = x - y;
                int prev_k;
                if (k == -d ||
                    (k != d && vd[offset + k - 1] < vd[offset + k + 1]))
                    prev_k = k + 1;
                else
                    prev_k = k - 1;
                int prev_x = vd[offset + prev_k];
                int prev_y = prev_x - prev_k;
                while (x > prev_x && y > prev_y) {
                    --x;
                    --y;
                    rev_matches.emplace_back(off_a + x, off_b + y);
                }
                if (d > 0) {
                    x = prev_x;
                    y = prev_y;
                }
            }
            script.matches.insert(script.matches.end(), rev_matches.rbegin(),
                                  rev_matches.rend());
        }
    }

    for (int i = 0; i < suffix; ++i)
        script.matches.emplace_back(n - suffix + i, m - suffix + i);

    for (auto [oi, ni] : script.matches) {
        script.old_kept[static_cast<std::size_t>(oi)] = true;
        script.new_kept[static_cast<std::size_t>(ni)] = true;
    }
    return script;
}

} // namespace

std::vector<Hunk> diff_lines(std::string_view old_text, std::string_view new_text) {
    auto old_lines = strings::split_lines(old_text);
    auto new_lines = strings::split_lines(new_text);

    std::unordered_map<std::string_view, int> table;
    auto a = intern_lines(old_lines, table);
    auto b = intern_lines(new_lines, table);
    auto script = myers_diff(a, b);

    std::vector<Hunk> hunks;
    std::size_t oi = 0, ni = 0, mi = 0;
    while (oi < old_lines.size() || ni < new_lines.size()) {
        bool old_is_match = oi < old_lines.size() && script.old_kept[oi];
        bool new_is_match = ni < new_lines.size() && script.new_kept[ni];
        if (old_is_match && new_is_match) {
            ++oi;
            ++ni;
            ++mi;
            continue;
        }

        Hunk hunk;
        hunk.old_start = static_cast<int>(oi) + (old_is_match ? 0 : 1);
        hunk.new_start = static_cast<int>(ni) + (new_is_match ? 0 : 1);
        while (oi < old_lines.size() && !script.old_kept[oi]) {
            hunk.removed.emplace_back(static_cast<int>(oi) + 1,
                                      std::string(old_lines[oi]));
            ++oi;
        }
        while (ni < new_lines.size() && !script.new_kept[ni]) {
            hunk.added.emplace_back(static_cast<int>(ni) + 1,
                                    std::string(new_lines[ni]));
            ++ni;
        }
        if (hunk.removed.empty())
            hunk.old_start = static_cast<int>(oi); // anchor: insert after this line
        if (hunk.added.empty())
            hunk.new_start = static_cast<int>(ni);
        hunks.push_back(std::move(hunk));
    }
    (void)mi;
    return hunks;
}

namespace {

FileDiff make_content_diff(const std::string& old_path, std::uint32_t old_mode,
                           const std::string& old_content,
                           const std::string& new_path, std::uint32_t new_mode,
                           const std::string& new_content, bool renamed) {
    FileDiff diff;
    diff.old_path = old_path;
    diff.new_path = new_path;
    diff.old_mode = old_mode;
    diff.new_mode = new_mode;
    if (is_binary(old_content) || is_binary(new_content)) {
        diff.change_kind = ChangeKind::MetaOnly;
        return diff;
    }
    diff.hunks = diff_lines(old_content, new_content);
    if (renamed)
        diff.change_kind = ChangeKind::Renamed;
    else if (diff.hunks.empty())
        diff.change_kind = ChangeKind::MetaOnly; // mode/permission update only
    else
        diff.change_kind = ChangeKind::Modified;
    return diff;
}

} // namespace

std::vector<FileDiff> diff_commits(const Repository& repo, const ObjectId& base,
                                   const ObjectId& target) {
    // Validates both commits exist.
    repo.commit(base);
    repo.commit(target);
    if (base == target)
        return {};

    auto base_flat = repo.flatten_commit(base);
    auto target_flat = repo.flatten_commit(target);

    struct Pending {
        std::string path;
        Repository::PathEntry entry;
    };
    std::vector<FileDiff> out;
    std::vector<Pending> deleted;
    std::vector<Pending> added;

    for (const auto& [path, entry] : *base_flat) {
        auto it = target_flat->find(path);
        if (it == target_flat->end()) {
            deleted.push_back({path, entry});
            continue;
        }
        if (it->second.id == entry.id) {
            if (it->second.mode != entry.mode) {
                FileDiff diff;
                diff.old_path = path;
                diff.new_path = path;
                diff.old_mode = entry.mode;
                diff.new_mode = it->second.mode;
                diff.change_kind = ChangeKind::MetaOnly;
                out.push_back(std::move(diff));
            }
            continue;
        }
        out.push_back(make_content_diff(path, entry.mode, repo.blob(entry.id),
                                        path, it->second.mode,
                                        repo.blob(it->second.id), false));
    }
    for (const auto& [path, entry] : *target_flat) {
        if (base_flat->find(path) == base_flat->end())
            added.push_back({path, entry});
    }

    // Rename detection: exact blob matches first, then content similarity.
    std::vector<bool> deleted_used(deleted.size(), false);
    std::vector<bool> added_used(added.size(), false);

    for (std::size_t ai = 0; ai < added.size(); ++ai) {
        for (std::size_t di = 0; di < deleted.size(); ++di) {
            if (deleted_used[di])
                continue;
            if (deleted[di].entry.id == added[ai].entry.id) {
                FileDiff diff;
                diff.old_path = deleted[di].path;
                diff.new_path = added[ai].path;
                diff.old_mode = deleted[di].entry.mode;
                diff.new_mode = added[ai].entry.mode;
                diff.change_kind = ChangeKind::Renamed;
                out.push_back(std::move(diff));
                deleted_used[di] = true;
                added_used[ai] = true;
                break;
            }
        }
    }

    struct Candidate {
        double score;
        std::size_t di;
        std::size_t ai;
    };
    std::vector<Candidate> candidates;
    for (std::size_t di = 0; di < deleted.size(); ++di) {
        if (deleted_used[di])
            continue;
        std::string old_content = repo.blob(deleted[di].entry.id);
        if (is_binary(old_content))
            continue;
        for (std::size_t ai = 0; ai < added.size(); ++ai) {
            if (added_used[ai])
                continue;
            std::string new_content = repo.blob(added[ai].entry.id);
            if (is_binary(new_content))
                continue;
            double score = content_similarity(old_content, new_content);
            if (score >= kRenameThreshold)
                candidates.push_back({score, di, ai});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& x,
                                                        const Candidate& y) {
        if (x.score != y.score)
            return x.score > y.score;
        if (deleted[x.di].path != deleted[y.di].path)
            return deleted[x.di].path < deleted[y.di].path;
        return added[x.ai].path < added[y.ai].path;
    });
    for (const auto& cand : candidates) {
        if (deleted_used[cand.di] || added_used[cand.ai])
            continue;
        deleted_used[cand.di] = true;
        added_used[cand.ai] = true;
        out.push_back(make_content_diff(
            deleted[cand.di].path, deleted[cand.di].entry.mode,
            repo.blob(deleted[cand.di].entry.id), added[cand.ai].path,
            added[cand.ai].entry.mode, repo.blob(added[cand.ai].entry.id), true));
    }

    for (std::size_t di = 0; di < deleted.size(); ++di) {
        if (deleted_used[di])
            continue;
        FileDiff diff;
        diff.old_path = deleted[di].path;
        diff.old_mode = deleted[di].entry.mode;
        diff.change_kind = ChangeKind::Deleted;
        std::string content = repo.blob(deleted[di].entry.id);
        if (!is_binary(content))
            diff.hunks = diff_lines(content, "");
        out.push_back(std::move(diff));
    }
    for (std::size_t ai = 0; ai < added.size(); ++ai) {
        if (added_used[ai])
            continue;
        FileDiff diff;
        diff.new_path = added[ai].path;
        diff.new_mode = added[ai].entry.mode;
        diff.change_kind = ChangeKind::Added;
        std::string content = repo.blob(added[ai].entry.id);
        if (!is_binary(content))
            diff.hunks = diff_lines("", content);
        out.push_back(std::move(diff));
    }

    std::sort(out.begin(), out.end(), [](const FileDiff& a, const FileDiff& b) {
        return a.display_path() < b.display_path();
    });
    return out;
}

std::vector<FileDiff> diff_with_first_parent(const Repository& repo,
                                             const ObjectId& commit_id) {
    auto c = repo.commit(commit_id);
    if (!c->parents.empty())
        return diff_commits(repo, c->parents.front(), commit_id);

    // Root commit: everything is an addition.
    std::vector<FileDiff> out;
    auto flat = repo.flatten_commit(commit_id);
    for (const auto& [path, entry] : *flat) {
        FileDiff diff;
        diff.new_path = path;
        diff.new_mode = entry.mode;
        diff.change_kind = ChangeKind::Added;
        std::string content = repo.blob(entry.id);
        if (!is_binary(content))
            diff.hunks = diff_lines("", content);
        out.push_back(std::move(diff));
    }
    return out;
}

bool is_meta_change(const Repository& repo, const ObjectId& commit_id) {
    auto c = repo.commit(commit_id);
    if (c->is_merge())
        return true;
    auto diffs = diff_with_first_parent(repo, commit_id);
    return std::all_of(diffs.begin(), diffs.end(), [](const FileDiff& d) {
        return d.change_kind == ChangeKind::MetaOnly;
    });
}

} // namespace prszz::vcs
