#include "prszz/forge/snapshot_store.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/json_io.hpp"

#include <algorithm>

namespace prszz::forge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Field accessors that raise SchemaViolation naming the entity.

const json& require(const json& obj, const char* field, const std::string& entity) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        throw SchemaViolation(entity + ": missing required field '" + field + "'");
    return *it;
}

std::string get_string(const json& obj, const char* field, const std::string& fallback = "") {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        return fallback;
    return it->get<std::string>();
}

std::optional<std::string> get_opt_string(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    return it->get<std::string>();
}

std::optional<std::int64_t> get_opt_int(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    return it->get<std::int64_t>();
}

json comments_to_json(const std::vector<Comment>& comments) {
    json out = json::array();
    for (const auto& comment : comments)
        out.push_back({{"author", comment.author},
                       {"time", comment.time},
                       {"text", comment.text}});
    return out;
}

std::vector<Comment> comments_from_json(const json& value) {
    std::vector<Comment> out;
    for (const auto& item : value) {
        Comment comment;
        comment.author = get_string(item, "author");
        comment.time = item.value("time", std::int64_t{0});
        comment.text = get_string(item, "text");
        out.push_back(std::move(comment));
    }
    return out;
}

json links_to_json(const std::vector<IntegratedLink>& links) {
    json out = json::array();
    for (const auto& link : links)
        out.push_back({{"system", std::string(system_name(link.target.system))},
                       {"key", link.target.key},
                       {"kind", link.kind}});
    return out;
}

std::vector<IntegratedLink> links_from_json(const json& value,
                                            const std::string& entity) {
    std::vector<IntegratedLink> out;
    for (const auto& item : value) {
        IntegratedLink link;
        link.target.system =
            parse_system(require(item, "system", entity).get<std::string>());
        link.target.key = require(item, "key", entity).get<std::string>();
        link.kind = get_string(item, "kind", "integrated");
        out.push_back(std::move(link));
    }
    return out;
}

constexpr const char* kIssueFields[] = {
    "system",  "key",       "title",            "description", "labels",
    "status",  "resolution", "created_at",      "closed_at",   "assignee",
    "comments", "integrated_links"};

constexpr const char* kPullFields[] = {
    "key",        "title",    "description",      "state",     "merged",
    "merge_commit", "created_at", "closed_at",    "assignee",  "labels",
    "inner_commits", "comments", "reviews",       "integrated_links"};

} // namespace

json issue_to_json(const IssueTicket& issue) {
    json out = issue.extra.is_object() ? issue.extra : json::object();
    out["system"] = std::string(system_name(issue.ref.system));
    out["key"] = issue.ref.key;
    out["title"] = issue.title;
    out["description"] = issue.description;
    out["labels"] = issue.labels;
    out["status"] = issue.status;
    if (issue.resolution)
        out["resolution"] = *issue.resolution;
    else
        out.erase("resolution");
    out["created_at"] = issue.created_at;
    if (issue.closed_at)
        out["closed_at"] = *issue.closed_at;
    else
        out.erase("closed_at");
    if (issue.assignee)
        out["assignee"] = *issue.assignee;
    else
        out.erase("assignee");
    out["comments"] = comments_to_json(issue.comments);
    out["integrated_links"] = links_to_json(issue.integrated_links);
    return out;
}

IssueTicket issue_from_json(const json& value) {
    std::string entity =
        "issue " + get_string(value, "system", "?") + "-" + get_string(value, "key", "?");
    IssueTicket issue;
    issue.ref.system = parse_system(require(value, "system", entity).get<std::string>());
    issue.ref.key = require(value, "key", entity).get<std::string>();
    issue.title = get_string(value, "title");
    issue.description = get_string(value, "description");
    if (auto it = value.find("labels"); it != value.end())
        for (const auto& label : *it)
            issue.labels.insert(label.get<std::string>());
    issue.status = get_string(value, "status");
    issue.resolution = get_opt_string(value, "resolution");
    issue.created_at = require(value, "created_at", entity).get<std::int64_t>();
    issue.closed_at = get_opt_int(value, "closed_at");
    if (issue.closed_at && *issue.closed_at < issue.created_at)
        throw SchemaViolation(entity + ": closed_at precedes created_at");
    issue.assignee = get_opt_string(value, "assignee");
    if (auto it = value.find("comments"); it != value.end())
        issue.comments = comments_from_json(*it);
    if (auto it = value.find("integrated_links"); it != value.end())
        issue.integrated_links = links_from_json(*it, entity);

    issue.extra = value;
    for (const char* field : kIssueFields)
        issue.extra.erase(field);
    return issue;
}

json pull_to_json(const PullRequest& pull) {
    json out = pull.extra.is_object() ? pull.extra : json::object();
    out["key"] = pull.ref.key;
    out["title"] = pull.title;
    out["description"] = pull.description;
    out["state"] = pull.state == PrState::Open ? "open" : "closed";
    out["merged"] = pull.merged;
    if (pull.merge_commit)
        out["merge_commit"] = pull.merge_commit->hex();
    else
        out.erase("merge_commit");
    out["created_at"] = pull.created_at;
    if (pull.closed_at)
        out["closed_at"] = *pull.closed_at;
    else
        out.erase("closed_at");
    if (pull.assignee)
        out["assignee"] = *pull.assignee;
    else
        out.erase("assignee");
    out["labels"] = pull.labels;

    json inner = json::array();
    for (const auto& commit : pull.inner_commits) {
        json c = {{"hash", commit.hash.hex()},
                  {"message", commit.message},
                  {"author_name", commit.author_name},
                  {"author_email", commit.author_email},
                  {"author_time", commit.author_time}};
        if (commit.files) {
            json files = json::array();
            for (const auto& file : *commit.files) {
                json f = {{"path", file.path},
                          {"added_lines", file.added_lines},
                          {"removed_lines", file.removed_lines}};
                if (!file.added_ranges.empty()) {
                    json ranges = json::array();
                    for (auto [start, count] : file.added_ranges)
                        ranges.push_back({start, count});
                    f["added_ranges"] = ranges;
                }
                files.push_back(std::move(f));
            }
            c["files"] = std::move(files);
        }
        inner.push_back(std::move(c));
    }
    out["inner_commits"] = std::move(inner);
    out["comments"] = comments_to_json(pull.comments);
    out["reviews"] = comments_to_json(pull.reviews);
    out["integrated_links"] = links_to_json(pull.integrated_links);
    return out;
}

PullRequest pull_from_json(const json& value) {
    std::string entity = "pull " + get_string(value, "key", "?");
    PullRequest pull;
    pull.ref.system = System::PullRequest;
    pull.ref.key = require(value, "key", entity).get<std::string>();
    pull.title = get_string(value, "title");
    pull.description = get_string(value, "description");
    pull.state = get_string(value, "state", "open") == "closed" ? PrState::Closed
                                                                : PrState::Open;
    pull.merged = value.value("merged", false);
    if (pull.merged && pull.state != PrState::Closed)
        throw SchemaViolation(entity + ": merged pull request must be closed");
    if (auto hex = get_opt_string(value, "merge_commit")) {
        auto id = vcs::ObjectId::parse(*hex);
        if (!id)
            throw SchemaViolation(entity + ": malformed merge_commit");
        pull.merge_commit = *id;
    }
    pull.created_at = require(value, "created_at", entity).get<std::int64_t>();
    pull.closed_at = get_opt_int(value, "closed_at");
    pull.assignee = get_opt_string(value, "assignee");
    if (auto it = value.find("labels"); it != value.end())
        for (const auto& label : *it)
            pull.labels.insert(label.get<std::string>());

    if (auto it = value.find("inner_commits"); it != value.end()) {
        for (const auto& item : *it) {
            InnerCommit commit;
            auto hex = require(item, "hash", entity).get<std::string>();
            auto id = vcs::ObjectId::parse(hex);
            if (!id)
                throw SchemaViolation(entity + ": malformed inner commit hash");
            commit.hash = *id;
            commit.message = get_string(item, "message");
            commit.author_name = get_string(item, "author_name");
            commit.author_email = get_string(item, "author_email");
            commit.author_time = item.value("author_time", std::int64_t{0});
            if (auto files_it = item.find("files"); files_it != item.end() &&
                                                    !files_it->is_null()) {
                std::vector<InnerFileChange> files;
                for (const auto& file : *files_it) {
                    InnerFileChange change;
                    change.path = require(file, "path", entity).get<std::string>();
                    change.added_lines = file.value("added_lines", 0);
                    change.removed_lines = file.value("removed_lines", 0);
                    if (auto ranges = file.find("added_ranges");
                        ranges != file.end()) {
                        for (const auto& range : *ranges)
                            change.added_ranges.emplace_back(
                                range.at(0).get<int>(), range.at(1).get<int>());
                    }
                    files.push_back(std::move(change));
                }
                commit.files = std::move(files);
            }
            pull.inner_commits.push_back(std::move(commit));
        }
    }
    if (pull.merged && pull.inner_commits.empty())
        throw SchemaViolation(entity + ": merged pull request without inner commits");

    if (auto it = value.find("comments"); it != value.end())
        pull.comments = comments_from_json(*it);
    if (auto it = value.find("reviews"); it != value.end())
        pull.reviews = comments_from_json(*it);
    if (auto it = value.find("integrated_links"); it != value.end())
        pull.integrated_links = links_from_json(*it, entity);

    pull.extra = value;
    for (const char* field : kPullFields)
        pull.extra.erase(field);
    return pull;
}

void save_snapshot(const Snapshot& snapshot, const fs::path& dir) {
    Snapshot sorted = snapshot;
    sorted.sort_entries();

    std::error_code ec;
    fs::remove_all(dir / "issues", ec);
    fs::remove_all(dir / "pulls", ec);
    fs::create_directories(dir / "issues");
    fs::create_directories(dir / "pulls");

    for (const auto& issue : sorted.issues) {
        std::string name = std::string(system_name(issue.ref.system)) + "-" +
                           issue.ref.key + ".json";
        json_io::write_file(dir / "issues" / name, issue_to_json(issue));
    }
    for (const auto& pull : sorted.pulls)
        json_io::write_file(dir / "pulls" / (pull.ref.key + ".json"),
                            pull_to_json(pull));

    json manifest = {{"project_id", sorted.project_id},
                     {"fetched_at", sorted.fetched_at},
                     {"issues", sorted.issues.size()},
                     {"pulls", sorted.pulls.size()}};
    json_io::write_file(dir / "manifest.json", manifest);
}

Snapshot load_snapshot(const fs::path& dir) {
    if (!fs::is_regular_file(dir / "manifest.json"))
        throw IoError("no snapshot manifest under " + dir.string());

    json manifest = json_io::read_file(dir / "manifest.json");
    Snapshot snapshot;
    snapshot.project_id = manifest.value("project_id", "");
    snapshot.fetched_at = manifest.value("fetched_at", std::int64_t{0});

    auto list_sorted = [](const fs::path& sub) {
        std::vector<fs::path> files;
        std::error_code ec;
        if (fs::is_directory(sub, ec))
            for (const auto& entry : fs::directory_iterator(sub))
                if (entry.path().extension() == ".json")
                    files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        return files;
    };

    for (const auto& path : list_sorted(dir / "issues"))
        snapshot.issues.push_back(issue_from_json(json_io::read_file(path)));
    for (const auto& path : list_sorted(dir / "pulls"))
        snapshot.pulls.push_back(pull_from_json(json_io::read_file(path)));

    snapshot.sort_entries();
    return snapshot;
}

} // namespace prszz::forge
