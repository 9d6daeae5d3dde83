#include "prszz/forge/clients.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/parallel.hpp"
#include "prszz/support/strings.hpp"
#include "prszz/support/timeparse.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <thread>

namespace prszz::forge {

using nlohmann::json;

std::string url_encode(std::string_view value) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(value.size());
    for (unsigned char c : value) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0x0f]);
        }
    }
    return out;
}

namespace {

void default_sleep(int seconds) {
    std::this_thread::sleep_for(std::chrono::seconds(seconds));
}

std::int64_t default_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

struct RequestContext {
    HttpTransport& transport;
    HeaderList headers;
    const FetchOptions& options;

    std::function<void(int)> sleeper() const {
        return options.sleep_seconds ? options.sleep_seconds : default_sleep;
    }
    std::function<std::int64_t()> clock() const {
        return options.now ? options.now : default_now;
    }
};

// GET with rate-limit handling: 429/403-with-exhausted-quota waits until the
// advertised reset (or Retry-After), bounded by max_retries.
HttpResponse request_with_retry(const RequestContext& ctx, const std::string& url) {
    auto sleeper = ctx.sleeper();
    auto clock = ctx.clock();
    bool rate_limited = false;

    for (int attempt = 0; attempt <= ctx.options.max_retries; ++attempt) {
        HttpResponse response = ctx.transport.get(url, ctx.headers);

        if (response.status == 401)
            throw AuthFailure("authentication rejected for " + url);

        bool quota_exhausted =
            response.headers.count("x-ratelimit-remaining") != 0 &&
            response.headers.at("x-ratelimit-remaining") == "0";
        if (response.status == 429 ||
            (response.status == 403 && quota_exhausted)) {
            rate_limited = true;
            std::int64_t wait = 1 << attempt;
            if (auto it = response.headers.find("retry-after");
                it != response.headers.end())
                wait = std::max(1, std::atoi(it->second.c_str()));
            else if (auto reset = response.headers.find("x-ratelimit-reset");
                     reset != response.headers.end())
                wait = std::max<std::int64_t>(
                    1, std::atoll(reset->second.c_str()) - clock());
            sleeper(static_cast<int>(wait));
            continue;
        }
        if (response.status == 403)
            throw AuthFailure("access forbidden for " + url);
        if (response.status >= 500) {
            sleeper(1 << attempt);
            continue;
        }
        if (response.status != 200)
            throw NetworkError("unexpected status " +
                               std::to_string(response.status) + " for " + url);
        return response;
    }

    if (rate_limited)
        throw RateLimitExhausted("rate limit still exhausted after " +
                                 std::to_string(ctx.options.max_retries) +
                                 " retries: " + url);
    throw NetworkError("request failed after retries: " + url);
}

json request_json(const RequestContext& ctx, const std::string& url) {
    HttpResponse response = request_with_retry(ctx, url);
    try {
        return json::parse(response.body);
    } catch (const json::parse_error& e) {
        throw NetworkError("malformed response body for " + url + ": " + e.what());
    }
}

// Follows pagination until a page signals the end: an explicit Link header
// without rel="next", a short page, or an empty page.
std::vector<json> paginate(const RequestContext& ctx, const std::string& base_url,
                           int per_page) {
    std::vector<json> items;
    for (int page = 1;; ++page) {
        std::string url = base_url + (base_url.find('?') == std::string::npos
                                          ? "?"
                                          : "&") +
                          "per_page=" + std::to_string(per_page) +
                          "&page=" + std::to_string(page);

        HttpResponse response = request_with_retry(ctx, url);
        json body;
        try {
            body = json::parse(response.body);
        } catch (const json::parse_error& e) {
            throw NetworkError("malformed response body for " + url + ": " +
                               e.what());
        }
        if (!body.is_array())
            throw NetworkError("expected array page for " + url);
        for (auto& item : body)
            items.push_back(std::move(item));

        bool has_link = response.headers.count("link") != 0;
        bool has_next = has_link &&
                        response.headers.at("link").find("rel=\"next\"") !=
                            std::string::npos;
        if (body.empty())
            break;
        if (has_link && !has_next)
            break;
        if (!has_link && static_cast<int>(body.size()) < per_page)
            break;
    }
    return items;
}

std::int64_t parse_time_field(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        return 0;
    if (it->is_number())
        return it->get<std::int64_t>();
    auto parsed = timeparse::parse_iso8601(it->get<std::string>());
    return parsed.value_or(0);
}

std::optional<std::int64_t> parse_opt_time(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    if (it->is_number())
        return it->get<std::int64_t>();
    return timeparse::parse_iso8601(it->get<std::string>());
}

std::vector<IntegratedLink> timeline_links(const json& events) {
    std::vector<IntegratedLink> links;
    for (const auto& event : events) {
        std::string kind;
        auto type = event.value("event", "");
        if (type == "connected")
            kind = "integrated";
        else if (type == "cross-referenced")
            kind = "mention";
        else
            continue;

        const json* source_issue = nullptr;
        if (auto source = event.find("source"); source != event.end()) {
            if (auto issue = source->find("issue"); issue != source->end())
                source_issue = &*issue;
        }
        if (source_issue == nullptr)
            continue;

        IntegratedLink link;
        link.kind = kind;
        link.target.system = source_issue->contains("pull_request")
                                 ? System::PullRequest
                                 : System::GithubIssue;
        link.target.key = std::to_string(source_issue->value("number", 0));
        links.push_back(std::move(link));
    }
    return links;
}

std::vector<Comment> github_comments(const json& items, const char* time_field) {
    std::vector<Comment> comments;
    for (const auto& item : items) {
        Comment comment;
        if (auto user = item.find("user"); user != item.end() && !user->is_null())
            comment.author = user->value("login", "");
        comment.time = parse_time_field(item, time_field);
        comment.text = item.value("body", "");
        if (comment.time == 0 && comment.text.empty())
            continue; // unsubmitted review placeholders
        comments.push_back(std::move(comment));
    }
    return comments;
}

// "@@ -a,b +c,d @@" headers of a unified patch -> new-file ranges.
std::vector<std::pair<int, int>> patch_added_ranges(const std::string& patch) {
    std::vector<std::pair<int, int>> ranges;
    for (auto line : strings::split_lines(patch)) {
        if (!line.starts_with("@@"))
            continue;
        auto plus = line.find('+');
        if (plus == std::string_view::npos)
            continue;
        auto rest = line.substr(plus + 1);
        int start = 0, count = 1;
        std::size_t i = 0;
        while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i])))
            start = start * 10 + (rest[i++] - '0');
        if (i < rest.size() && rest[i] == ',') {
            ++i;
            count = 0;
            while (i < rest.size() &&
                   std::isdigit(static_cast<unsigned char>(rest[i])))
                count = count * 10 + (rest[i++] - '0');
        }
        if (count > 0)
            ranges.emplace_back(start, count);
    }
    return ranges;
}

} // namespace

Snapshot fetch_github(HttpTransport& transport, const std::string& owner_repo,
                      const std::string& token, std::int64_t window_start,
                      std::int64_t window_end, const std::string& api_base,
                      const FetchOptions& options) {
    RequestContext ctx{transport,
                       {{"Accept", "application/vnd.github+json"},
                        {"User-Agent", "prszz"}},
                       options};
    if (!token.empty())
        ctx.headers.emplace_back("Authorization", "Bearer " + token);

    const std::string repo_base = api_base + "/repos/" + owner_repo;
    Snapshot snapshot;
    snapshot.project_id = owner_repo;
    snapshot.fetched_at = ctx.clock()();

    auto in_window = [&](std::int64_t t) {
        return t >= window_start && t <= window_end;
    };

    // Issues (the endpoint interleaves pull requests; those are skipped here).
    auto issue_items = paginate(
        ctx, repo_base + "/issues?state=all&sort=created&direction=asc",
        options.per_page);
    std::vector<const json*> issue_rows;
    for (const auto& item : issue_items) {
        if (item.contains("pull_request"))
            continue;
        if (!in_window(parse_time_field(item, "created_at")))
            continue;
        issue_rows.push_back(&item);
    }

    std::vector<IssueTicket> issues(issue_rows.size());
    parallel::parallel_for(
        issue_rows.size(), options.parallelism, [&](std::size_t i) {
            const json& item = *issue_rows[i];
            IssueTicket issue;
            issue.ref.system = System::GithubIssue;
            issue.ref.key = std::to_string(item.value("number", 0));
            issue.title = item.value("title", "");
            if (!item.value("body", json()).is_null())
                issue.description = item.value("body", "");
            if (auto labels = item.find("labels"); labels != item.end())
                for (const auto& label : *labels)
                    issue.labels.insert(label.value("name", ""));
            issue.status =
                strings::iequals(item.value("state", ""), "closed") ? "Closed"
                                                                    : "Open";
            if (auto reason = item.find("state_reason");
                reason != item.end() && !reason->is_null())
                issue.resolution = reason->get<std::string>();
            issue.created_at = parse_time_field(item, "created_at");
            issue.closed_at = parse_opt_time(item, "closed_at");
            if (auto assignee = item.find("assignee");
                assignee != item.end() && !assignee->is_null())
                issue.assignee = assignee->value("login", "");

            const std::string n = issue.ref.key;
            issue.comments = github_comments(
                request_json(ctx, repo_base + "/issues/" + n + "/comments"),
                "created_at");
            issue.integrated_links = timeline_links(
                request_json(ctx, repo_base + "/issues/" + n + "/timeline"));
            issues[i] = std::move(issue);
        });
    snapshot.issues = std::move(issues);

    // Pull requests with full detail.
    auto pull_items = paginate(
        ctx, repo_base + "/pulls?state=all&sort=created&direction=asc",
        options.per_page);
    std::vector<const json*> pull_rows;
    for (const auto& item : pull_items) {
        if (!in_window(parse_time_field(item, "created_at")))
            continue;
        pull_rows.push_back(&item);
    }

    std::vector<PullRequest> pulls(pull_rows.size());
    parallel::parallel_for(
        pull_rows.size(), options.parallelism, [&](std::size_t i) {
            const json& item = *pull_rows[i];
            PullRequest pull;
            pull.ref.system = System::PullRequest;
            pull.ref.key = std::to_string(item.value("number", 0));
            pull.title = item.value("title", "");
            if (!item.value("body", json()).is_null())
                pull.description = item.value("body", "");
            pull.state = strings::iequals(item.value("state", ""), "closed")
                             ? PrState::Closed
                             : PrState::Open;
            pull.merged = item.contains("merged_at") && !item["merged_at"].is_null();
            if (auto sha = item.find("merge_commit_sha");
                sha != item.end() && !sha->is_null())
                pull.merge_commit = vcs::ObjectId::parse(sha->get<std::string>());
            pull.created_at = parse_time_field(item, "created_at");
            pull.closed_at = parse_opt_time(item, "closed_at");
            if (auto assignee = item.find("assignee");
                assignee != item.end() && !assignee->is_null())
                pull.assignee = assignee->value("login", "");
            if (auto labels = item.find("labels"); labels != item.end())
                for (const auto& label : *labels)
                    pull.labels.insert(label.value("name", ""));

            const std::string n = pull.ref.key;
            auto commits =
                request_json(ctx, repo_base + "/pulls/" + n + "/commits");
            for (const auto& row : commits) {
                InnerCommit inner;
                if (auto id = vcs::ObjectId::parse(row.value("sha", "")))
                    inner.hash = *id;
                if (auto commit = row.find("commit"); commit != row.end()) {
                    inner.message = commit->value("message", "");
                    if (auto author = commit->find("author");
                        author != commit->end() && !author->is_null()) {
                        inner.author_name = author->value("name", "");
                        inner.author_email = author->value("email", "");
                        inner.author_time = parse_time_field(*author, "date");
                    }
                }
                // Per-commit file lists carry what f2/f3 need.
                auto detail = request_json(
                    ctx, repo_base + "/commits/" + row.value("sha", ""));
                if (auto files = detail.find("files"); files != detail.end()) {
                    std::vector<InnerFileChange> changes;
                    for (const auto& file : *files) {
                        InnerFileChange change;
                        change.path = file.value("filename", "");
                        change.added_lines = file.value("additions", 0);
                        change.removed_lines = file.value("deletions", 0);
                        if (auto patch = file.find("patch"); patch != file.end())
                            change.added_ranges =
                                patch_added_ranges(patch->get<std::string>());
                        changes.push_back(std::move(change));
                    }
                    inner.files = std::move(changes);
                }
                pull.inner_commits.push_back(std::move(inner));
            }

            pull.comments = github_comments(
                request_json(ctx, repo_base + "/issues/" + n + "/comments"),
                "created_at");
            pull.reviews = github_comments(
                request_json(ctx, repo_base + "/pulls/" + n + "/reviews"),
                "submitted_at");
            pull.integrated_links = timeline_links(
                request_json(ctx, repo_base + "/issues/" + n + "/timeline"));
            pulls[i] = std::move(pull);
        });
    snapshot.pulls = std::move(pulls);

    snapshot.sort_entries();
    return snapshot;
}

Snapshot fetch_jira(HttpTransport& transport, const std::string& base_url,
                    const std::string& project_key, const std::string& token,
                    std::int64_t window_start, std::int64_t window_end,
                    const FetchOptions& options) {
    RequestContext ctx{transport,
                       {{"Accept", "application/json"}, {"User-Agent", "prszz"}},
                       options};
    if (!token.empty())
        ctx.headers.emplace_back("Authorization", "Bearer " + token);

    Snapshot snapshot;
    snapshot.project_id = project_key;
    snapshot.fetched_at = ctx.clock()();

    const std::string jql =
        "project = " + project_key + " ORDER BY created ASC";
    const std::string search_base = base_url + "/rest/api/2/search?jql=" +
                                    url_encode(jql) +
                                    "&fields=summary,description,labels,"
                                    "issuetype,status,resolution,created,"
                                    "resolutiondate,assignee,comment,issuelinks";

    std::int64_t total = -1;
    int fetched = 0;
    while (total < 0 || fetched < total) {
        std::string url = search_base + "&startAt=" + std::to_string(fetched) +
                          "&maxResults=" + std::to_string(options.jira_page);
        json page = request_json(ctx, url);
        total = page.value("total", std::int64_t{0});
        auto issues = page.value("issues", json::array());
        if (issues.empty())
            break;
        fetched += static_cast<int>(issues.size());

        for (const auto& item : issues) {
            const json fields = item.value("fields", json::object());
            std::int64_t created = parse_time_field(fields, "created");
            if (created < window_start || created > window_end)
                continue;

            IssueTicket issue;
            issue.ref.system = System::JiraIssue;
            issue.ref.key = item.value("key", "");
            issue.title = fields.value("summary", "");
            if (!fields.value("description", json()).is_null())
                issue.description = fields.value("description", "");
            if (auto labels = fields.find("labels"); labels != fields.end())
                for (const auto& label : *labels)
                    issue.labels.insert(label.get<std::string>());
            // The case-insensitive issue type is folded into the labels.
            if (auto type = fields.find("issuetype");
                type != fields.end() && !type->is_null())
                issue.labels.insert(strings::to_lower(type->value("name", "")));
            if (auto status = fields.find("status");
                status != fields.end() && !status->is_null())
                issue.status = status->value("name", "");
            if (auto resolution = fields.find("resolution");
                resolution != fields.end() && !resolution->is_null())
                issue.resolution = resolution->value("name", "");
            issue.created_at = created;
            issue.closed_at = parse_opt_time(fields, "resolutiondate");
            if (auto assignee = fields.find("assignee");
                assignee != fields.end() && !assignee->is_null()) {
                auto name = assignee->value("name", "");
                issue.assignee =
                    name.empty() ? assignee->value("displayName", "") : name;
            }
            if (auto comment = fields.find("comment"); comment != fields.end()) {
                for (const auto& row : comment->value("comments", json::array())) {
                    Comment c;
                    if (auto author = row.find("author");
                        author != row.end() && !author->is_null())
                        c.author = author->value("displayName", "");
                    c.time = parse_time_field(row, "created");
                    c.text = row.value("body", "");
                    issue.comments.push_back(std::move(c));
                }
            }
            if (auto links = fields.find("issuelinks"); links != fields.end()) {
                for (const auto& row : *links) {
                    IntegratedLink link;
                    link.target.system = System::JiraIssue;
                    if (auto out = row.find("outwardIssue"); out != row.end())
                        link.target.key = out->value("key", "");
                    else if (auto in = row.find("inwardIssue"); in != row.end())
                        link.target.key = in->value("key", "");
                    else
                        continue;
                    if (auto type = row.find("type"); type != row.end())
                        link.kind = strings::to_lower(type->value("name", ""));
                    issue.integrated_links.push_back(std::move(link));
                }
            }
            snapshot.issues.push_back(std::move(issue));
        }
    }

    snapshot.sort_entries();
    return snapshot;
}

} // namespace prszz::forge
