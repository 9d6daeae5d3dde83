#include <doctest.h>

#include "prszz/forge/bugs.hpp"
#include "prszz/forge/clients.hpp"
#include "prszz/forge/snapshot_store.hpp"
#include "prszz/support/errors.hpp"
#include "prszz/support/json_io.hpp"
#include "support/test_helpers.hpp"

#include <fstream>

using namespace prszz;
using namespace testsupport;
using forge::IssueRef;
using forge::System;
using nlohmann::json;

namespace {

forge::IssueTicket make_issue(System system, const std::string& key,
                              const std::string& status, std::int64_t created) {
    forge::IssueTicket issue;
    issue.ref = {system, key};
    issue.title = "ticket " + key;
    issue.status = status;
    issue.created_at = created;
    return issue;
}

forge::PullRequest make_pull(const std::string& key, bool merged,
                             std::int64_t created) {
    forge::PullRequest pull;
    pull.ref = {System::PullRequest, key};
    pull.title = "pull " + key;
    pull.created_at = created;
    pull.merged = merged;
    pull.state = merged ? forge::PrState::Closed : forge::PrState::Open;
    if (merged) {
        forge::InnerCommit inner;
        inner.hash = *vcs::ObjectId::parse(std::string(40, 'a'));
        inner.message = "inner";
        inner.author_email = "dev@example.invalid";
        pull.inner_commits.push_back(inner);
    }
    return pull;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("snapshot save/load round-trip is byte-identical") {
    forge::Snapshot snapshot;
    snapshot.project_id = "acme/widget";
    snapshot.fetched_at = 1700000000;

    auto issue = make_issue(System::JiraIssue, "ACME-7", "Resolved", 1600001000);
    issue.resolution = "Fixed";
    issue.closed_at = 1600002000;
    issue.labels = {"bug"};
    issue.comments.push_back({"alice", 1600001500, "see #12"});
    issue.integrated_links.push_back({{System::PullRequest, "12"}, "integrated"});
    issue.extra["custom_field"] = json{{"nested", true}};
    snapshot.issues.push_back(issue);
    snapshot.issues.push_back(make_issue(System::GithubIssue, "3", "Open", 1600000000));
    snapshot.pulls.push_back(make_pull("12", true, 1600000500));

    TempDir tmp;
    forge::save_snapshot(snapshot, tmp.path());
    auto loaded = forge::load_snapshot(tmp.path());

    // Unknown fields survive.
    REQUIRE(loaded.issues.size() == 2);
    const auto* jira = loaded.find_issue({System::JiraIssue, "ACME-7"});
    REQUIRE(jira != nullptr);
    CHECK(jira->extra.contains("custom_field"));

    TempDir second;
    forge::save_snapshot(loaded, second.path());

    for (const char* rel : {"manifest.json", "issues/jira-ACME-7.json",
                            "issues/github-3.json", "pulls/12.json"}) {
        CAPTURE(rel);
        CHECK(read_file(tmp.path() / rel) == read_file(second.path() / rel));
    }
}

TEST_CASE("snapshot load rejects a ticket without created_at") {
    TempDir tmp;
    forge::save_snapshot({}, tmp.path());
    json bad = {{"system", "github"}, {"key", "9"}, {"status", "Open"}};
    json_io::write_file(tmp.path() / "issues" / "github-9.json", bad);

    try {
        forge::load_snapshot(tmp.path());
        FAIL("expected SchemaViolation");
    } catch (const SchemaViolation& e) {
        CHECK(std::string(e.what()).find("github-9") != std::string::npos);
        CHECK(std::string(e.what()).find("created_at") != std::string::npos);
    }
}

TEST_CASE("hand-written minimal snapshot loads with defaults resolved") {
    TempDir tmp;
    json_io::write_file(tmp.path() / "manifest.json",
                        json{{"project_id", "mini"}, {"fetched_at", 1}});
    json_io::write_file(
        tmp.path() / "issues" / "github-1.json",
        json{{"system", "github"}, {"key", "1"}, {"created_at", 100}});
    json_io::write_file(tmp.path() / "pulls" / "2.json",
                        json{{"key", "2"}, {"created_at", 200}});

    auto snapshot = forge::load_snapshot(tmp.path());
    REQUIRE(snapshot.issues.size() == 1);
    REQUIRE(snapshot.pulls.size() == 1);
    CHECK(snapshot.issues[0].status.empty());
    CHECK(snapshot.issues[0].labels.empty());
    CHECK_FALSE(snapshot.issues[0].closed_at.has_value());
    CHECK(snapshot.pulls[0].state == forge::PrState::Open);
    CHECK_FALSE(snapshot.pulls[0].merged);
}

TEST_CASE("select_bug_tickets filters by label and resolution") {
    forge::Snapshot snapshot;

    auto resolved_bug = make_issue(System::GithubIssue, "1", "Closed", 10);
    resolved_bug.labels = {"Bug"};
    snapshot.issues.push_back(resolved_bug);

    auto open_bug = make_issue(System::GithubIssue, "2", "Open", 20);
    open_bug.labels = {"bug"};
    snapshot.issues.push_back(open_bug);

    auto resolved_feature = make_issue(System::GithubIssue, "3", "Closed", 30);
    resolved_feature.labels = {"enhancement"};
    snapshot.issues.push_back(resolved_feature);

    auto jira_wontfix = make_issue(System::JiraIssue, "ACME-1", "Closed", 40);
    jira_wontfix.labels = {"bug"};
    jira_wontfix.resolution = "Won't Fix";
    snapshot.issues.push_back(jira_wontfix);

    auto jira_fixed = make_issue(System::JiraIssue, "ACME-2", "Resolved", 50);
    jira_fixed.labels = {"bug"};
    jira_fixed.resolution = "Fixed";
    snapshot.issues.push_back(jira_fixed);

    auto merged_pr = make_pull("7", true, 60);
    merged_pr.labels = {"kind/bug"};
    snapshot.pulls.push_back(merged_pr);

    auto unmerged_pr = make_pull("8", false, 70);
    unmerged_pr.labels = {"bug"};
    snapshot.pulls.push_back(unmerged_pr);

    auto bugs = forge::select_bug_tickets(snapshot);
    std::set<std::string> keys;
    for (const auto& bug : bugs)
        keys.insert(bug.ref.key);
    CHECK(keys == std::set<std::string>{"1", "ACME-2", "7"});

    // Pure filter: membership only depends on labels/status.
    CHECK(bugs.size() <= snapshot.issues.size() + snapshot.pulls.size());
}

TEST_CASE("fetch_github drains two pages of 100 pull requests") {
    forge::RecordedTransport transport;
    const std::string base = "https://api.test/repos/acme/widget";

    transport.add(base + "/issues?state=all&sort=created&direction=asc&per_page=100&page=1",
                  {200, {}, "[]"});

    auto pr_row = [](int number) {
        return json{{"number", number},
                    {"title", "pr " + std::to_string(number)},
                    {"state", "open"},
                    {"created_at", "2020-06-0" + std::string(1, '1') + "T00:00:00Z"},
                    {"merged_at", nullptr}};
    };
    json page1 = json::array();
    for (int i = 1; i <= 100; ++i)
        page1.push_back(pr_row(i));
    json page2 = json::array();
    for (int i = 101; i <= 200; ++i)
        page2.push_back(pr_row(i));

    transport.add(base + "/pulls?state=all&sort=created&direction=asc&per_page=100&page=1",
                  {200, {{"link", "<page2>; rel=\"next\""}}, page1.dump()});
    transport.add(base + "/pulls?state=all&sort=created&direction=asc&per_page=100&page=2",
                  {200, {{"link", "<page1>; rel=\"prev\""}}, page2.dump()});

    for (int i = 1; i <= 200; ++i) {
        std::string n = std::to_string(i);
        transport.add(base + "/pulls/" + n + "/commits", {200, {}, "[]"});
        transport.add(base + "/issues/" + n + "/comments", {200, {}, "[]"});
        transport.add(base + "/pulls/" + n + "/reviews", {200, {}, "[]"});
        transport.add(base + "/issues/" + n + "/timeline", {200, {}, "[]"});
    }

    auto snapshot = forge::fetch_github(transport, "acme/widget", "token", 0,
                                        2000000000, "https://api.test");
    CHECK(snapshot.pulls.size() == 200); // completeness under pagination
    CHECK(snapshot.issues.empty());
    // Order-stable: sorted by numeric key.
    CHECK(snapshot.pulls.front().ref.key == "1");
    CHECK(snapshot.pulls.back().ref.key == "200");

    // Replaying identical responses yields an identical snapshot.
    auto again = forge::fetch_github(transport, "acme/widget", "token", 0,
                                     2000000000, "https://api.test");
    REQUIRE(again.pulls.size() == snapshot.pulls.size());
    for (std::size_t i = 0; i < again.pulls.size(); ++i)
        CHECK(again.pulls[i].ref.key == snapshot.pulls[i].ref.key);
}

TEST_CASE("fetch_github captures linked issues and window filters") {
    forge::RecordedTransport transport;
    const std::string base = "https://api.test/repos/acme/widget";

    json issues = json::array();
    issues.push_back({{"number", 5},
                      {"title", "crash"},
                      {"state", "closed"},
                      {"labels", json::array({{{"name", "bug"}}})},
                      {"created_at", "2020-06-01T00:00:00Z"},
                      {"closed_at", "2020-06-02T00:00:00Z"}});
    issues.push_back({{"number", 6},
                      {"title", "outside window"},
                      {"state", "open"},
                      {"created_at", "2030-01-01T00:00:00Z"}});
    transport.add(base + "/issues?state=all&sort=created&direction=asc&per_page=100&page=1",
                  {200, {}, issues.dump()});
    transport.add(base + "/issues/5/comments", {200, {}, "[]"});
    transport.add(base + "/issues/5/timeline",
                  {200, {},
                   json::array({{{"event", "connected"},
                                 {"source", {{"issue", {{"number", 41}, {"pull_request", json::object()}}}}}},
                                {{"event", "cross-referenced"},
                                 {"source", {{"issue", {{"number", 9}}}}}}})
                       .dump()});

    json pulls = json::array();
    pulls.push_back({{"number", 41},
                     {"title", "fix crash"},
                     {"state", "closed"},
                     {"merged_at", "2020-06-02T00:00:00Z"},
                     {"merge_commit_sha", std::string(40, 'b')},
                     {"created_at", "2020-06-01T12:00:00Z"},
                     {"closed_at", "2020-06-02T00:00:00Z"}});
    transport.add(base + "/pulls?state=all&sort=created&direction=asc&per_page=100&page=1",
                  {200, {}, pulls.dump()});
    transport.add(base + "/pulls/41/commits",
                  {200, {},
                   json::array({{{"sha", std::string(40, 'c')},
                                 {"commit",
                                  {{"message", "fix the crash"},
                                   {"author",
                                    {{"name", "Dev"},
                                     {"email", "dev@example.invalid"},
                                     {"date", "2020-06-01T13:00:00Z"}}}}}}})
                       .dump()});
    transport.add(base + "/commits/" + std::string(40, 'c'),
                  {200, {},
                   json{{"files", json::array({{{"filename", "src/a.cc"},
                                                {"additions", 3},
                                                {"deletions", 1},
                                                {"patch", "@@ -10,2 +10,3 @@"}}})}}
                       .dump()});
    transport.add(base + "/issues/41/comments", {200, {}, "[]"});
    transport.add(base + "/pulls/41/reviews", {200, {}, "[]"});
    transport.add(base + "/issues/41/timeline", {200, {}, "[]"});

    auto snapshot = forge::fetch_github(transport, "acme/widget", "", 1500000000,
                                        1700000000, "https://api.test");

    REQUIRE(snapshot.issues.size() == 1); // window excluded #6
    const auto& issue = snapshot.issues[0];
    CHECK(issue.ref.key == "5");
    REQUIRE(issue.integrated_links.size() == 2);
    CHECK(issue.integrated_links[0].target ==
          IssueRef{System::PullRequest, "41"});
    CHECK(issue.integrated_links[0].kind == "integrated");
    CHECK(issue.integrated_links[1].kind == "mention");

    REQUIRE(snapshot.pulls.size() == 1);
    const auto& pull = snapshot.pulls[0];
    CHECK(pull.merged);
    REQUIRE(pull.inner_commits.size() == 1);
    REQUIRE(pull.inner_commits[0].files.has_value());
    CHECK((*pull.inner_commits[0].files)[0].path == "src/a.cc");
    CHECK((*pull.inner_commits[0].files)[0].added_ranges ==
          std::vector<std::pair<int, int>>{{10, 3}});
}

TEST_CASE("fetch_github window covering zero items yields an empty snapshot") {
    forge::RecordedTransport transport;
    const std::string base = "https://api.test/repos/acme/widget";
    transport.add(base + "/issues?state=all&sort=created&direction=asc&per_page=100&page=1",
                  {200, {}, "[]"});
    transport.add(base + "/pulls?state=all&sort=created&direction=asc&per_page=100&page=1",
                  {200, {}, "[]"});

    auto snapshot =
        forge::fetch_github(transport, "acme/widget", "", 0, 1, "https://api.test");
    CHECK(snapshot.issues.empty());
    CHECK(snapshot.pulls.empty());
}

TEST_CASE("rate limited responses retry with bounded attempts") {
    const std::string base = "https://api.test/repos/acme/widget";
    const std::string url =
        base + "/issues?state=all&sort=created&direction=asc&per_page=100&page=1";

    forge::FetchOptions options;
    int slept = 0;
    options.sleep_seconds = [&](int) { ++slept; };
    options.now = [] { return std::int64_t{1000}; };

    SUBCASE("recovers after the limit resets") {
        forge::RecordedTransport transport;
        transport.add(url, {403,
                            {{"x-ratelimit-remaining", "0"},
                             {"x-ratelimit-reset", "1005"}},
                            ""});
        transport.add(url, {200, {}, "[]"});
        transport.add(base + "/pulls?state=all&sort=created&direction=asc&per_page=100&page=1",
                      {200, {}, "[]"});

        auto snapshot = forge::fetch_github(transport, "acme/widget", "", 0,
                                            2000000000, "https://api.test", options);
        CHECK(snapshot.issues.empty());
        CHECK(slept == 1);
    }

    SUBCASE("exhausts retries") {
        forge::RecordedTransport transport;
        // A single permanently rate-limited response replays forever.
        transport.add(url, {429, {{"retry-after", "2"}}, ""});
        CHECK_THROWS_AS(forge::fetch_github(transport, "acme/widget", "", 0,
                                            2000000000, "https://api.test",
                                            options),
                        RateLimitExhausted);
    }

    SUBCASE("bad token fails fast") {
        forge::RecordedTransport transport;
        transport.add(url, {401, {}, ""});
        CHECK_THROWS_AS(forge::fetch_github(transport, "acme/widget", "bad", 0,
                                            2000000000, "https://api.test",
                                            options),
                        AuthFailure);
    }
}

TEST_CASE("fetch_jira maps resolved bug tickets and issue links") {
    forge::RecordedTransport transport;
    const std::string jql = forge::url_encode("project = KAFKA ORDER BY created ASC");
    const std::string search =
        "https://jira.test/rest/api/2/search?jql=" + jql +
        "&fields=summary,description,labels,issuetype,status,resolution,created,"
        "resolutiondate,assignee,comment,issuelinks";

    json issue = {
        {"key", "KAFKA-9176"},
        {"fields",
         {{"summary", "broker crash"},
          {"description", "stack trace"},
          {"labels", json::array({"regression"})},
          {"issuetype", {{"name", "Bug"}}},
          {"status", {{"name", "Resolved"}}},
          {"resolution", {{"name", "Fixed"}}},
          {"created", "2020-01-08T10:23:45.000+0000"},
          {"resolutiondate", "2020-02-01T08:00:00.000+0000"},
          {"assignee", {{"name", "jdoe"}, {"displayName", "J. Doe"}}},
          {"comment",
           {{"comments", json::array({{{"author", {{"displayName", "J. Doe"}}},
                                       {"created", "2020-01-09T00:00:00.000+0000"},
                                       {"body", "will fix"}}})}}},
          {"issuelinks",
           json::array({{{"type", {{"name", "Duplicate"}}},
                         {"outwardIssue", {{"key", "KAFKA-100"}}}}})}}}};
    json page = {{"startAt", 0}, {"maxResults", 50}, {"total", 1},
                 {"issues", json::array({issue})}};
    transport.add(search + "&startAt=0&maxResults=50", {200, {}, page.dump()});

    auto snapshot = forge::fetch_jira(transport, "https://jira.test", "KAFKA", "",
                                      0, 2000000000);
    REQUIRE(snapshot.issues.size() == 1);
    const auto& ticket = snapshot.issues[0];
    CHECK(ticket.ref == IssueRef{System::JiraIssue, "KAFKA-9176"});
    CHECK(ticket.status == "Resolved");
    CHECK(ticket.labels.contains("bug")); // issue type folded into labels
    CHECK(ticket.labels.contains("regression"));
    CHECK(ticket.resolution == "Fixed");
    CHECK(ticket.assignee == "jdoe");
    REQUIRE(ticket.integrated_links.size() == 1);
    CHECK(ticket.integrated_links[0].target ==
          IssueRef{System::JiraIssue, "KAFKA-100"});
    CHECK(ticket.integrated_links[0].kind == "duplicate");

    // Selected as a bug carrier.
    auto bugs = forge::select_bug_tickets(snapshot);
    REQUIRE(bugs.size() == 1);
    CHECK(bugs[0].ref.key == "KAFKA-9176");
}

TEST_CASE("fetch_jira on an empty project") {
    forge::RecordedTransport transport;
    const std::string jql = forge::url_encode("project = EMPTY ORDER BY created ASC");
    const std::string search =
        "https://jira.test/rest/api/2/search?jql=" + jql +
        "&fields=summary,description,labels,issuetype,status,resolution,created,"
        "resolutiondate,assignee,comment,issuelinks";
    transport.add(search + "&startAt=0&maxResults=50",
                  {200, {}, json{{"total", 0}, {"issues", json::array()}}.dump()});

    auto snapshot = forge::fetch_jira(transport, "https://jira.test", "EMPTY", "",
                                      0, 2000000000);
    CHECK(snapshot.issues.empty());
}
