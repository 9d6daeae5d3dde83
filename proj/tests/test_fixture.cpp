#include <doctest.h>

#include "prszz/fixture/generator.hpp"
#include "prszz/support/errors.hpp"
#include "prszz/fixture/oracle.hpp"
#include "prszz/pipeline/pipeline.hpp"
#include "prszz/support/json_io.hpp"
#include "prszz/vcs/blame.hpp"
#include "support/scenarios.hpp"
#include "support/test_helpers.hpp"

#include <fstream>

using namespace prszz;
using namespace testsupport;
using forge::System;
using vcs::ObjectId;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("walkthrough fixture: layout, strategies and git interop") {
    TempDir tmp;
    auto generated = fixture::generate_fixture(walkthrough_script(), tmp.path());

    REQUIRE(generated.mainline.size() == 7);
    CHECK(generated.pr_resolving.at(30) == generated.mainline[2]); // c3
    CHECK(generated.pr_resolving.at(40) == generated.mainline[6]); // c7

    auto fsck = run_git(tmp.path() / "repo", {"fsck", "--strict"});
    CHECK_MESSAGE(fsck.exit_code == 0, fsck.output);

    // The snapshot loads back and both PRs reconstruct as squashes.
    auto repo = vcs::Repository::open(generated.repo_dir);
    for (const auto& pull : generated.snapshot.pulls) {
        CHECK(pr::detect_strategy(pull, repo) == pr::MergeStrategy::Squash);
        auto map = pr::reconstruct(pull, repo);
        REQUIRE(map.has_value());
        CHECK(map->mapped_commits().size() == 1);
    }

    // c4 is the permission-only commit.
    CHECK(vcs::is_meta_change(repo, generated.mainline[3]));
    CHECK_FALSE(vcs::is_meta_change(repo, generated.mainline[2]));

    // Truth file exists and resolves.
    CHECK(generated.truth.fixing.at({System::GithubIssue, "101"}) ==
          generated.mainline[6]);
    CHECK(generated.truth.inducing.at(generated.mainline[6])
              .contains(generated.mainline[2]));
}

TEST_CASE("fixture generation is byte-identical across runs") {
    TempDir first;
    TempDir second;
    auto a = fixture::generate_fixture(walkthrough_script(), first.path());
    auto b = fixture::generate_fixture(walkthrough_script(), second.path());

    REQUIRE(a.mainline.size() == b.mainline.size());
    for (std::size_t i = 0; i < a.mainline.size(); ++i)
        CHECK(a.mainline[i] == b.mainline[i]); // object ids reproduce

    CHECK(slurp(first.path() / "ground_truth.json") ==
          slurp(second.path() / "ground_truth.json"));
    CHECK(slurp(first.path() / "fixture_manifest.json") ==
          slurp(second.path() / "fixture_manifest.json"));
    CHECK(slurp(first.path() / "snapshot" / "manifest.json") ==
          slurp(second.path() / "snapshot" / "manifest.json"));
}

TEST_CASE("replay oracle agrees with blame on the fixture") {
    TempDir tmp;
    auto generated = fixture::generate_fixture(walkthrough_script(), tmp.path());
    auto repo = vcs::Repository::open(generated.repo_dir);

    for (const char* path : {"File_A.java", "File_B.java"}) {
        auto blamed = vcs::blame_file(repo, generated.mainline[6], path);
        for (const auto& origin : blamed) {
            CAPTURE(path);
            CAPTURE(origin.line);
            CHECK(fixture::replay_line_origin(repo, generated.mainline[6], path,
                                              origin.line) ==
                  origin.origin_commit);
        }
    }
}

TEST_CASE("unrealizable declared truth is refused") {
    auto script = walkthrough_script();
    // Claim the meta commit (c4) induced the bug: it never touched the
    // fixed lines, so the replay oracle cannot reach it.
    script.truth_inducing["@pr:40"] = {"@commit:4"};
    TempDir tmp;
    CHECK_THROWS_AS(fixture::generate_fixture(script, tmp.path()), FixtureError);
}

TEST_CASE("script JSON round trip") {
    auto script = walkthrough_script();
    auto json = script.to_json();
    auto back = fixture::FixtureScript::from_json(json);
    CHECK(back.actions.size() == script.actions.size());
    CHECK(back.truth_fixing == script.truth_fixing);
    CHECK(back.truth_inducing == script.truth_inducing);
    CHECK(back.to_json() == json);
}

TEST_CASE("walkthrough end-to-end: match and trace through the pipeline") {
    TempDir tmp;
    auto generated = fixture::generate_fixture(walkthrough_script(), tmp.path());
    auto config = fixture_config(tmp.path());

    auto data = pipeline::prepare(config);
    REQUIRE(data.bugs.size() == 1);

    const ObjectId c3 = generated.mainline[2];
    const ObjectId c5 = generated.mainline[4];
    const ObjectId c6 = generated.mainline[5];
    const ObjectId c7 = generated.mainline[6];

    // Phase 1: the bug maps to the squashed fix via the PR link.
    auto records = pipeline::run_match(data, config);
    REQUIRE(records.size() == 1);
    CHECK(records[0].via == fix::MatchRoute::PrLink);
    REQUIRE(records[0].fixing_commit.has_value());
    CHECK(*records[0].fixing_commit == c7);
    CHECK(records[0].fixing_pr->key == "40");

    // Phase 2 under the PR variant.
    auto variant = trace::VariantId::make(trace::VariantName::PR);
    auto results = pipeline::run_trace(data, config, variant, records);
    REQUIRE(results.size() == 1);
    const auto& result = results[0];

    // Non-rejected suspects: exactly {c3}, secured; c5 rejected by s1.
    std::vector<ObjectId> live;
    bool saw_c5 = false;
    for (const auto& suspect : result.suspects) {
        if (!suspect.rejected()) {
            live.push_back(suspect.commit);
            continue;
        }
        if (suspect.commit == c5) {
            saw_c5 = true;
            CHECK(*suspect.rejected_reason ==
                  trace::RejectionReason::AfterPrCreated);
        }
    }
    REQUIRE(live.size() == 1);
    CHECK(live[0] == c3);
    CHECK(saw_c5);
    for (const auto& suspect : result.suspects)
        if (suspect.commit == c3)
            CHECK(suspect.secured);

    // f1 base c6; File_C (f3) and File_D (f2) are filtered, so neither c1
    // nor c2 appear among the suspects via those files.
    for (const auto& suspect : result.suspects)
        for (const auto& contribution : suspect.contributions)
            CHECK(contribution.base_path == "File_B.java");
    (void)c6;

    // Fine-grained entries stay within the parse() method File_B change.
    bool has_method_entry = false;
    for (const auto& entry : result.fine_grained) {
        if (entry.inducing_commit != c3)
            continue;
        if (entry.level == trace::GrainLevel::Method) {
            has_method_entry = true;
            REQUIRE(entry.method_header.has_value());
            CHECK(entry.method_header->find("parse") != std::string::npos);
            CHECK(entry.method_header->find("render") == std::string::npos);
        }
        if (entry.level == trace::GrainLevel::File)
            CHECK(entry.path == "File_B.java");
    }
    CHECK(has_method_entry);

    // Variant B on the same fixture keeps c5 and sees File_C/File_D noise.
    auto b_results = pipeline::run_trace(
        data, config, trace::VariantId::make(trace::VariantName::B), records);
    REQUIRE(b_results.size() == 1);
    std::set<ObjectId> b_live;
    for (const auto& suspect : b_results[0].suspects)
        if (!suspect.rejected())
            b_live.insert(suspect.commit);
    CHECK(b_live.contains(c5));
    CHECK(b_live.contains(c3));
    CHECK(b_live.size() > 1);

    // Evaluation against the generated truth: the PR pipeline is exact.
    auto fixing = eval::eval_fixing(records, generated.truth);
    CHECK(fixing.f_score == doctest::Approx(1.0));
    auto inducing = eval::eval_inducing(results, generated.truth, false);
    CHECK(inducing.precision == doctest::Approx(1.0));
    CHECK(inducing.recall == doctest::Approx(1.0));
}
