#include "prszz/eval/dataset.hpp"

#include "prszz/support/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace prszz::eval {

using trace::GrainLevel;
using trace::TraceResult;

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos)
        return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"')
            quoted += "\"\"";
        else
            quoted += c;
    }
    quoted += "\"";
    return quoted;
}

struct Row {
    std::string level;
    std::string bug_system;
    std::string bug_key;
    std::string variant;
    std::string fixing_commit;
    std::string inducing_commit;
    std::string path;
    std::string method_header;
    bool secured = false;

    std::string render() const {
        return csv_field(level) + ',' + csv_field(bug_system) + ',' +
               csv_field(bug_key) + ',' + csv_field(variant) + ',' +
               fixing_commit + ',' + inducing_commit + ',' + csv_field(path) +
               ',' + csv_field(method_header) + ',' +
               (secured ? "true" : "false") + '\n';
    }
};

} // namespace

std::string render_dataset(const std::vector<TraceResult>& results,
                           GrainLevel level) {
    std::vector<Row> rows;

    for (const auto& result : results) {
        // Selection variants report only the selected inducing commit.
        auto included = [&](const trace::Suspect& suspect) {
            if (suspect.rejected())
                return false;
            if (result.variant.selection)
                return result.selected && suspect.commit == *result.selected;
            return true;
        };

        std::set<vcs::ObjectId> included_commits;
        std::map<vcs::ObjectId, bool> secured_of;
        for (const auto& suspect : result.suspects) {
            secured_of[suspect.commit] = suspect.secured;
            if (included(suspect))
                included_commits.insert(suspect.commit);
        }

        if (level == GrainLevel::Commit) {
            for (const auto& id : included_commits) {
                Row row;
                row.level = "commit";
                row.bug_system = std::string(forge::system_name(result.bug.system));
                row.bug_key = result.bug.key;
                row.variant = result.variant.to_string();
                row.fixing_commit = result.fix.hex();
                row.inducing_commit = id.hex();
                row.secured = secured_of[id];
                rows.push_back(std::move(row));
            }
            continue;
        }

        for (const auto& entry : result.fine_grained) {
            if (entry.level != level)
                continue;
            if (!included_commits.contains(entry.inducing_commit))
                continue;
            Row row;
            row.level = std::string(trace::grain_name(level));
            row.bug_system = std::string(forge::system_name(result.bug.system));
            row.bug_key = result.bug.key;
            row.variant = result.variant.to_string();
            row.fixing_commit = result.fix.hex();
            row.inducing_commit = entry.inducing_commit.hex();
            row.path = entry.path.value_or("");
            row.method_header = entry.method_header.value_or("");
            row.secured = secured_of[entry.inducing_commit];
            rows.push_back(std::move(row));
        }
    }

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.bug_system != b.bug_system)
            return a.bug_system < b.bug_system;
        if (a.bug_key != b.bug_key)
            return a.bug_key < b.bug_key;
        if (a.inducing_commit != b.inducing_commit)
            return a.inducing_commit < b.inducing_commit;
        if (a.path != b.path)
            return a.path < b.path;
        return a.method_header < b.method_header;
    });

    std::string out = "level,bug_system,bug_key,variant,fixing_commit,"
                      "inducing_commit,path,method_header,secured\n";
    for (const auto& row : rows)
        out += row.render();
    return out;
}

void write_dataset(const std::vector<TraceResult>& results, GrainLevel level,
                   const std::filesystem::path& out) {
    std::error_code ec;
    std::filesystem::create_directories(out.parent_path(), ec);
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file)
        throw IoError("cannot write " + out.string());
    file << render_dataset(results, level);
}

} // namespace prszz::eval
