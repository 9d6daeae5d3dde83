#include <doctest.h>

#include "prszz/trace/tracer.hpp"
#include "support/test_helpers.hpp"

using namespace prszz;
using namespace testsupport;
using prszz::fixture::FileState;
using forge::System;
using trace::RejectionReason;
using trace::SelectionStrategy;
using trace::VariantId;
using trace::VariantName;
using vcs::ObjectId;

namespace {

std::string lines(std::initializer_list<std::string> ls) {
    std::string out;
    for (const auto& l : ls) {
        out += l;
        out += "\n";
    }
    return out;
}

links::DistinctBug bug_at(std::int64_t created) {
    links::DistinctBug bug;
    bug.canonical = {System::GithubIssue, "1"};
    bug.aliases = {bug.canonical};
    bug.merged_ticket.ref = bug.canonical;
    bug.merged_ticket.created_at = created;
    bug.merged_ticket.closed_at = created + 1000;
    return bug;
}

filter::FilteredFix filtered_for(const vcs::Repository& repo,
                                 const ObjectId& base, const ObjectId& fix) {
    filter::FilteredFix filtered;
    filtered.base = base;
    filtered.files = vcs::diff_commits(repo, base, fix);
    return filtered;
}

struct TraceHarness {
    forge::Snapshot snapshot;
    lang::ProfileRegistry profiles = lang::ProfileRegistry::builtin();
    trace::BlameCache cache;

    trace::TraceContext ctx(const vcs::Repository& repo) {
        trace::TraceContext c{repo, snapshot};
        c.profiles = &profiles;
        c.blame_cache = &cache;
        return c;
    }
};

} // namespace

TEST_CASE("trace_suspects blames removed lines at the base") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit("c1", {{"a.java", FileState{lines({"int a() {", "  return 1;", "}"})}}});
    auto c2 = builder.commit(
        "introduce bug",
        {{"a.java", FileState{lines({"int a() {", "  return 2;", "}"})}}});
    auto base = builder.commit("unrelated", {{"b.txt", FileState{"x\n"}}});
    auto fix = builder.commit(
        "fix", {{"a.java", FileState{lines({"int a() {", "  return 1;", "}"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    TraceHarness harness;
    auto ctx = harness.ctx(repo);

    auto suspects = trace::trace_suspects(ctx, filtered_for(repo, base, fix),
                                          VariantId::make(VariantName::B));
    REQUIRE(suspects.size() == 1);
    CHECK(suspects[0].commit == c2);
    REQUIRE(suspects[0].contributions.size() == 1);
    CHECK(suspects[0].contributions[0].base_path == "a.java");
    CHECK(suspects[0].contributions[0].base_line == 2);
}

TEST_CASE("cosmetic fixture: B blames the whitespace commit, AG the origin") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto origin = builder.commit(
        "origin",
        {{"a.java", FileState{lines({"int f() {", "  int x=compute();", "  return x;", "}"})}}});
    auto whitespace = builder.commit(
        "reformat",
        {{"a.java", FileState{lines({"int f() {", "  int x = compute();", "  return x;", "}"})}}});
    auto base = builder.commit("noise", {{"b.txt", FileState{"n\n"}}});
    auto fix = builder.commit(
        "fix",
        {{"a.java", FileState{lines({"int f() {", "  int x = compute() + 1;", "  return x;", "}"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    TraceHarness harness;
    auto ctx = harness.ctx(repo);
    auto filtered = filtered_for(repo, base, fix);

    auto b_suspects =
        trace::trace_suspects(ctx, filtered, VariantId::make(VariantName::B));
    REQUIRE(b_suspects.size() == 1);
    CHECK(b_suspects[0].commit == whitespace);

    auto ag_suspects =
        trace::trace_suspects(ctx, filtered, VariantId::make(VariantName::AG));
    REQUIRE(ag_suspects.size() == 1);
    CHECK(ag_suspects[0].commit == origin);
}

TEST_CASE("AG skips cosmetic-only fix lines entirely") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit(
        "c1", {{"a.java", FileState{lines({"int g() {", "  return 7;", "}"})}}});
    auto base = builder.commit(
        "c2", {{"a.java", FileState{lines({"int g() {", "  return  7;", "}"})}}});
    // The fix only normalizes whitespace.
    auto fix = builder.commit(
        "whitespace fix",
        {{"a.java", FileState{lines({"int g() {", "  return 7;", "}"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    TraceHarness harness;
    auto ctx = harness.ctx(repo);
    auto filtered = filtered_for(repo, base, fix);

    CHECK_FALSE(
        trace::trace_suspects(ctx, filtered, VariantId::make(VariantName::B))
            .empty());
    CHECK(trace::trace_suspects(ctx, filtered, VariantId::make(VariantName::AG))
              .empty());
}

TEST_CASE("meta filter steps past merge-resolution edits and drops merge-born lines") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto origin = builder.commit(
        "origin",
        {{"a.java", FileState{lines({"int h() {", "  return 10;", "}"})}}});
    builder.checkout("side");
    builder.commit("side", {{"s.txt", FileState{"s\n"}}});
    builder.checkout("main");
    // The merge commit itself rewrites line 2 and appends a brand-new line 4.
    auto merge = builder.merge(
        "side", "merge with tweaks",
        {{"a.java",
          FileState{lines({"int h() {", "  return 12;", "}", "// merged note"})}}});
    auto fix = builder.commit(
        "fix",
        {{"a.java", FileState{lines({"int h() {", "  return 11;", "}"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    TraceHarness harness;
    auto ctx = harness.ctx(repo);
    auto filtered = filtered_for(repo, merge, fix);

    // Without the meta filter the merge commit is blamed for both lines.
    auto b_suspects =
        trace::trace_suspects(ctx, filtered, VariantId::make(VariantName::B));
    REQUIRE(b_suspects.size() == 1);
    CHECK(b_suspects[0].commit == merge);

    // MA: the rewritten line steps through to its previous origin, the
    // merge-born comment line is dropped as a MetaChange.
    auto ma_suspects =
        trace::trace_suspects(ctx, filtered, VariantId::make(VariantName::MA));
    std::vector<ObjectId> live;
    for (const auto& suspect : ma_suspects) {
        if (!suspect.rejected())
            live.push_back(suspect.commit);
        else
            CHECK(suspect.rejected_reason == RejectionReason::MetaChange);
    }
    REQUIRE(live.size() == 1);
    CHECK(live[0] == origin);
    for (const auto& suspect : ma_suspects) {
        if (suspect.rejected())
            continue;
        CHECK_FALSE(repo.commit(suspect.commit)->is_merge());
        CHECK_FALSE(vcs::is_meta_change(repo, suspect.commit));
    }
}

TEST_CASE("method trace attributes pure additions to the enclosing method") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto method_author = builder.commit(
        "add method",
        {{"a.java",
          FileState{lines({"class A {", "  int use(Object o) {",
                           "    return o.hashCode();", "  }", "}"})}}});
    auto base = builder.commit("noise", {{"b.txt", FileState{"x\n"}}});
    // Pure addition: a null check inside use().
    auto fix = builder.commit(
        "add null check",
        {{"a.java",
          FileState{lines({"class A {", "  int use(Object o) {",
                           "    if (o == null) return 0;",
                           "    return o.hashCode();", "  }", "}"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    TraceHarness harness;
    auto ctx = harness.ctx(repo);
    auto filtered = filtered_for(repo, base, fix);

    // Without method tracing there is nothing to blame.
    CHECK(trace::trace_suspects(ctx, filtered, VariantId::make(VariantName::B))
              .empty());

    auto variant = VariantId::make(VariantName::PR);
    auto suspects = trace::trace_suspects(ctx, filtered, variant);
    REQUIRE(suspects.size() == 1);
    CHECK(suspects[0].commit == method_author);
}

TEST_CASE("reject_suspects: temporal rules and PR membership") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto old_commit = builder.commit("old", {{"a.txt", FileState{"1\n"}}});
    auto late_commit = builder.commit("late", {{"a.txt", FileState{"2\n"}}});
    auto in_pr = builder.commit("inside pr", {{"a.txt", FileState{"3\n"}}});
    auto repo = vcs::Repository::open(tmp.path());

    auto old_time = repo.commit(old_commit)->commit_time();
    auto bug = bug_at(old_time + 500); // late_commit is after the report

    forge::PullRequest pull;
    pull.ref = {System::PullRequest, "9"};
    pull.created_at = old_time + 100;

    pr::InnerCommitMap map;
    map.pr = pull.ref;
    map.pairs.emplace_back(in_pr, in_pr);
    map.resolving_commit = in_pr;

    std::vector<trace::Suspect> suspects(3);
    suspects[0].commit = old_commit;
    suspects[1].commit = late_commit;
    suspects[2].commit = in_pr;

    trace::RejectionRuleSet rules;
    rules.temporal = true;
    rules.pr_temporal = true;
    auto rejected =
        trace::reject_suspects(suspects, bug, &pull, &map, rules, repo);

    CHECK_FALSE(rejected[0].rejected());
    REQUIRE(rejected[1].rejected());
    CHECK(*rejected[1].rejected_reason == RejectionReason::AfterBugReport);
    REQUIRE(rejected[2].rejected());
    CHECK(*rejected[2].rejected_reason == RejectionReason::InsideFixPr);

    // s1 beyond the bug report: commits between PR creation and the report.
    auto mid_bug = bug_at(old_time + 5000);
    auto s1_only = trace::reject_suspects(suspects, mid_bug, &pull, nullptr,
                                          rules, repo);
    REQUIRE(s1_only[1].rejected());
    CHECK(*s1_only[1].rejected_reason == RejectionReason::AfterPrCreated);

    // Rejection monotonicity: dropping pr_temporal can only keep more alive.
    trace::RejectionRuleSet weaker;
    weaker.temporal = true;
    weaker.pr_temporal = false;
    auto weak = trace::reject_suspects(suspects, mid_bug, &pull, nullptr,
                                       weaker, repo);
    for (std::size_t i = 0; i < suspects.size(); ++i)
        if (!s1_only[i].rejected())
            CHECK_FALSE(weak[i].rejected());
}

TEST_CASE("mark_secured lifts only after-bug-report rejections") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto sus_commit = builder.commit("suspect", {{"a.txt", FileState{"1\n"}}});
    auto repo = vcs::Repository::open(tmp.path());
    (void)repo;

    forge::IssueRef fix_pr{System::PullRequest, "40"};
    forge::IssueRef sus_pr{System::PullRequest, "30"};

    pr::InnerCommitMap sus_map;
    sus_map.pr = sus_pr;
    sus_map.pairs.emplace_back(sus_commit, sus_commit);
    sus_map.resolving_commit = sus_commit;
    std::map<std::string, pr::InnerCommitMap> maps{{"30", sus_map}};

    links::LinkGraph graph;
    graph.add_edge({links::NodeKey::issue(fix_pr), links::NodeKey::issue(sus_pr),
                    links::Provenance::TextMatch, "comment:0", ""});

    SUBCASE("unrejected suspect becomes secured") {
        std::vector<trace::Suspect> suspects(1);
        suspects[0].commit = sus_commit;
        auto marked = trace::mark_secured(suspects, fix_pr, graph, maps);
        CHECK(marked[0].secured);
        CHECK_FALSE(marked[0].rejected());
    }

    SUBCASE("AfterBugReport is lifted, AfterPrCreated stands") {
        std::vector<trace::Suspect> suspects(2);
        suspects[0].commit = sus_commit;
        suspects[0].rejected_reason = RejectionReason::AfterBugReport;
        suspects[1].commit = sus_commit;
        suspects[1].rejected_reason = RejectionReason::AfterPrCreated;
        auto marked = trace::mark_secured(suspects, fix_pr, graph, maps);
        CHECK(marked[0].secured);
        CHECK_FALSE(marked[0].rejected());
        CHECK_FALSE(marked[1].secured); // invariant: secured => not rejected
        CHECK(marked[1].rejected());
    }

    SUBCASE("no owning PR or no link: not secured") {
        std::vector<trace::Suspect> suspects(1);
        suspects[0].commit = sus_commit;
        links::LinkGraph empty;
        auto marked = trace::mark_secured(suspects, fix_pr, empty, maps);
        CHECK_FALSE(marked[0].secured);
        auto no_map = trace::mark_secured(suspects, fix_pr, graph, {});
        CHECK_FALSE(no_map[0].secured);
    }
}

TEST_CASE("select_inducing strategies") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit("seed", {{"a.txt", FileState{"0\n"}}});
    std::string big;
    for (int i = 0; i < 50; ++i)
        big += "line" + std::to_string(i) + "\n";
    auto small_commit = builder.commit("small", {{"a.txt", FileState{"1\n2\n"}}});
    auto big_commit = builder.commit("big", {{"big.txt", FileState{big}}});
    auto newest_commit = builder.commit("newest", {{"a.txt", FileState{"3\n"}}});
    auto repo = vcs::Repository::open(tmp.path());

    TraceHarness harness;
    auto ctx = harness.ctx(repo);

    std::vector<trace::Suspect> suspects(3);
    suspects[0].commit = small_commit;
    suspects[1].commit = big_commit;
    suspects[2].commit = newest_commit;

    auto largest =
        trace::select_inducing(suspects, SelectionStrategy::Largest, ctx);
    REQUIRE(largest.has_value());
    CHECK(*largest == big_commit);

    auto recent =
        trace::select_inducing(suspects, SelectionStrategy::Recent, ctx);
    CHECK(*recent == newest_commit);

    // Rejecting the newest moves Recent to the next one.
    suspects[2].rejected_reason = RejectionReason::AfterPrCreated;
    auto next = trace::select_inducing(suspects, SelectionStrategy::Recent, ctx);
    CHECK(*next == big_commit);

    // A secured suspect outranks recency under PrSelect.
    suspects[2].rejected_reason.reset();
    suspects[0].secured = true;
    auto pr_select =
        trace::select_inducing(suspects, SelectionStrategy::PrSelect, ctx);
    CHECK(*pr_select == small_commit);

    // Selection membership.
    std::vector<trace::Suspect> all_rejected(1);
    all_rejected[0].commit = small_commit;
    all_rejected[0].rejected_reason = RejectionReason::AfterBugReport;
    CHECK_FALSE(trace::select_inducing(all_rejected, SelectionStrategy::Recent, ctx)
                    .has_value());
}

TEST_CASE("suspect soundness: suspects are proper ancestors of the base") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit("c1", {{"a.java", FileState{lines({"int z() {", "  return 0;", "}"})}}});
    builder.commit("c2", {{"a.java", FileState{lines({"int z() {", "  return 1;", "}"})}}});
    auto base = builder.commit("c3", {{"b.txt", FileState{"b\n"}}});
    auto fix = builder.commit("c4", {{"a.java", FileState{lines({"int z() {", "  return 2;", "}"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    TraceHarness harness;
    auto ctx = harness.ctx(repo);
    for (const auto& suspect :
         trace::trace_suspects(ctx, filtered_for(repo, base, fix),
                               VariantId::make(VariantName::PR))) {
        CHECK(suspect.commit != base);
        CHECK(repo.is_ancestor(suspect.commit, base));
    }
}

TEST_CASE("refine_fine_grained: top-level inducing line gets file entry only") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto origin = builder.commit(
        "origin",
        {{"a.java", FileState{lines({"int TOP_LEVEL = 1;", "int other = 2;"})}}});
    auto base = builder.commit("pad", {{"p.txt", FileState{"p\n"}}});
    auto repo = vcs::Repository::open(tmp.path());

    TraceHarness harness;
    auto ctx = harness.ctx(repo);

    trace::Suspect suspect;
    suspect.commit = origin;
    suspect.contributions.push_back({"a.java", 1, "a.java", 1});

    filter::FilteredFix filtered;
    filtered.base = base;

    auto entries =
        trace::refine_fine_grained(ctx, suspect, nullptr, nullptr, filtered);
    bool has_commit = false, has_file = false, has_method = false;
    for (const auto& entry : entries) {
        if (entry.level == trace::GrainLevel::Commit)
            has_commit = true;
        if (entry.level == trace::GrainLevel::File)
            has_file = true;
        if (entry.level == trace::GrainLevel::Method)
            has_method = true;
    }
    CHECK(has_commit);
    CHECK(has_file);
    CHECK_FALSE(has_method); // line sits outside any method
}

TEST_CASE("run_variant skips unresolved fixes") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit("only", {{"a.txt", FileState{"x\n"}}});
    auto repo = vcs::Repository::open(tmp.path());

    TraceHarness harness;
    auto ctx = harness.ctx(repo);

    links::DistinctBug bug = bug_at(kEpochBase);
    fix::FixRecord unresolved;
    unresolved.bug = bug.canonical;
    unresolved.via = fix::MatchRoute::None;

    auto results = trace::run_variant(ctx, VariantId::make(VariantName::B),
                                      {unresolved}, {bug});
    CHECK(results.empty());
}

TEST_CASE("secured suppression removes unsecured live suspects when enabled") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto secured_origin = builder.commit(
        "secured origin",
        {{"a.java", FileState{lines({"int a() {", "  return 1;", "}"})}}});
    auto other_origin = builder.commit(
        "other origin",
        {{"b.java", FileState{lines({"int b() {", "  return 2;", "}"})}}});
    builder.commit(
        "fix", {{"a.java", FileState{lines({"int a() {", "  return 9;", "}"})}},
                {"b.java", FileState{lines({"int b() {", "  return 8;", "}"})}}});
    auto repo = vcs::Repository::open(tmp.path());
    (void)repo;

    // Synthetic post-marking state: one secured, one plain live suspect.
    std::vector<trace::Suspect> suspects(2);
    suspects[0].commit = secured_origin;
    suspects[0].secured = true;
    suspects[1].commit = other_origin;

    auto suppressed = trace::apply_secured_suppression(suspects);
    REQUIRE(suppressed.size() == 1);
    CHECK(suppressed[0].commit == secured_origin);

    // Without any secured suspect the set is untouched.
    std::vector<trace::Suspect> plain(1);
    plain[0].commit = other_origin;
    CHECK(trace::apply_secured_suppression(plain).size() == 1);
}
