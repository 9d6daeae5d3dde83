#include <doctest.h>

#include "prszz/eval/dataset.hpp"
#include "prszz/support/errors.hpp"
#include "prszz/eval/metrics.hpp"
#include "prszz/support/json_io.hpp"
#include "prszz/support/strings.hpp"
#include "support/test_helpers.hpp"

#include <nlohmann/json.hpp>

using namespace prszz;
using namespace testsupport;
using forge::IssueRef;
using forge::System;
using vcs::ObjectId;

namespace {

ObjectId commit_n(int n) {
    char c = static_cast<char>('0' + (n % 10));
    return *ObjectId::parse(std::string(40, c));
}

fix::FixRecord record_for(const std::string& key, std::optional<ObjectId> commit) {
    fix::FixRecord record;
    record.bug = {System::GithubIssue, key};
    record.fixing_commit = commit;
    record.via = commit ? fix::MatchRoute::MessageMatch : fix::MatchRoute::None;
    return record;
}

trace::TraceResult result_for(const ObjectId& fix,
                              std::vector<ObjectId> suspects,
                              std::optional<ObjectId> selected = {}) {
    trace::TraceResult result;
    result.bug = {System::GithubIssue, "1"};
    result.fix = fix;
    for (const auto& id : suspects) {
        trace::Suspect suspect;
        suspect.commit = id;
        result.suspects.push_back(std::move(suspect));
    }
    result.selected = selected;
    return result;
}

} // namespace

TEST_CASE("eval_fixing matches the counting rules") {
    eval::GroundTruth truth;
    truth.fixing[{System::GithubIssue, "1"}] = commit_n(1);
    truth.fixing[{System::GithubIssue, "2"}] = commit_n(2);
    truth.fixing[{System::GithubIssue, "3"}] = commit_n(3);

    std::vector<fix::FixRecord> predictions{
        record_for("1", commit_n(1)), // exact
        record_for("2", commit_n(9)), // wrong commit
        record_for("3", std::nullopt) // unmapped, truth non-null
    };

    auto metrics = eval::eval_fixing(predictions, truth);
    CHECK(metrics.tp == 1);
    CHECK(metrics.fp == 1);
    CHECK(metrics.fn == 2);
    CHECK(metrics.precision == doctest::Approx(0.5));
    CHECK(metrics.recall == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("eval_fixing: all exact predictions give unit scores") {
    eval::GroundTruth truth;
    std::vector<fix::FixRecord> predictions;
    for (int i = 1; i <= 4; ++i) {
        truth.fixing[{System::GithubIssue, std::to_string(i)}] = commit_n(i);
        predictions.push_back(record_for(std::to_string(i), commit_n(i)));
    }
    auto metrics = eval::eval_fixing(predictions, truth);
    CHECK(metrics.precision == doctest::Approx(1.0));
    CHECK(metrics.recall == doctest::Approx(1.0));
    CHECK(metrics.f_score == doctest::Approx(1.0));
}

TEST_CASE("eval_fixing: prediction against null truth is a lone FP") {
    eval::GroundTruth truth;
    truth.fixing[{System::GithubIssue, "1"}] = std::nullopt;
    truth.fixing[{System::GithubIssue, "2"}] = std::nullopt;

    std::vector<fix::FixRecord> predictions{record_for("1", commit_n(1)),
                                            record_for("2", std::nullopt)};
    auto metrics = eval::eval_fixing(predictions, truth);
    CHECK(metrics.tp == 0);
    CHECK(metrics.fp == 1);
    CHECK(metrics.fn == 0); // the correctly-unmapped bug is ignored
}

TEST_CASE("eval_fixing hand-count oracle on a 10-bug fixture") {
    auto table = prszz::json_io::read_file(test_data_dir() /
                                           "metrics_fixing_table.json");
    eval::GroundTruth truth;
    std::vector<fix::FixRecord> predictions;
    for (const auto& row : table.at("bugs")) {
        std::string key = row.at("bug").get<std::string>();
        if (row.at("truth").is_null())
            truth.fixing[{System::GithubIssue, key}] = std::nullopt;
        else
            truth.fixing[{System::GithubIssue, key}] =
                commit_n(row.at("truth").get<int>());
        if (row.at("predicted").is_null())
            predictions.push_back(record_for(key, std::nullopt));
        else
            predictions.push_back(
                record_for(key, commit_n(row.at("predicted").get<int>())));
    }
    auto metrics = eval::eval_fixing(predictions, truth);
    CHECK(metrics.tp == table.at("expected").at("tp").get<long>());
    CHECK(metrics.fp == table.at("expected").at("fp").get<long>());
    CHECK(metrics.fn == table.at("expected").at("fn").get<long>());
    CHECK(metrics.precision ==
          doctest::Approx(table.at("expected").at("precision").get<double>()));
    CHECK(metrics.recall ==
          doctest::Approx(table.at("expected").at("recall").get<double>()));
}

TEST_CASE("eval_fixing requires truth for every bug") {
    std::vector<fix::FixRecord> predictions{record_for("1", commit_n(1))};
    CHECK_THROWS_AS(eval::eval_fixing(predictions, {}), MissingTruth);
}

TEST_CASE("eval_inducing set accounting") {
    eval::GroundTruth truth;
    truth.inducing[commit_n(7)] = {commit_n(1)};

    auto result = result_for(commit_n(7), {commit_n(1), commit_n(2)});
    auto metrics = eval::eval_inducing({result}, truth, false);
    CHECK(metrics.tp == 1);
    CHECK(metrics.fp == 1);
    CHECK(metrics.fn == 0);

    // use_selected with the selected commit in a singleton truth.
    auto selected = result_for(commit_n(7), {commit_n(1), commit_n(2)}, commit_n(1));
    auto strict = eval::eval_inducing({selected}, truth, true);
    CHECK(strict.precision == doctest::Approx(1.0));
    CHECK(strict.recall == doctest::Approx(1.0));

    // Rejected suspects are not predictions.
    auto rejected = result_for(commit_n(7), {commit_n(1), commit_n(2)});
    rejected.suspects[1].rejected_reason = trace::RejectionReason::AfterBugReport;
    auto clean = eval::eval_inducing({rejected}, truth, false);
    CHECK(clean.fp == 0);

    CHECK_THROWS_AS(eval::eval_inducing({result_for(commit_n(9), {})}, truth, false),
                    MissingTruth);
}

TEST_CASE("eval_inducing micro-average over a mixed 5-fix fixture") {
    auto table = prszz::json_io::read_file(test_data_dir() /
                                           "metrics_inducing_table.json");
    eval::GroundTruth truth;
    std::vector<trace::TraceResult> results;
    for (const auto& row : table.at("fixes")) {
        ObjectId fix = commit_n(row.at("fix").get<int>());
        std::set<ObjectId> expected;
        for (const auto& n : row.at("truth"))
            expected.insert(commit_n(n.get<int>()));
        truth.inducing[fix] = expected;
        std::vector<ObjectId> suspects;
        for (const auto& n : row.at("predicted"))
            suspects.push_back(commit_n(n.get<int>()));
        results.push_back(result_for(fix, suspects));
    }
    auto metrics = eval::eval_inducing(results, truth, false);
    CHECK(metrics.tp == table.at("expected").at("tp").get<long>());
    CHECK(metrics.fp == table.at("expected").at("fp").get<long>());
    CHECK(metrics.fn == table.at("expected").at("fn").get<long>());
    CHECK(metrics.precision ==
          doctest::Approx(table.at("expected").at("precision").get<double>()));
    CHECK(metrics.recall ==
          doctest::Approx(table.at("expected").at("recall").get<double>()));
    CHECK(metrics.f_score ==
          doctest::Approx(table.at("expected").at("f_score").get<double>()));
}

TEST_CASE("metric bounds and F-score boundary cases") {
    eval::Metrics zero;
    zero.finalize();
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f_score == 0.0); // P+R = 0

    eval::Metrics perfect;
    perfect.tp = 5;
    perfect.finalize();
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f_score == 1.0); // P = R = 1

    eval::Metrics mixed;
    mixed.tp = 3;
    mixed.fp = 2;
    mixed.fn = 7;
    mixed.finalize();
    CHECK(mixed.precision >= 0.0);
    CHECK(mixed.precision <= 1.0);
    CHECK(mixed.recall >= 0.0);
    CHECK(mixed.recall <= 1.0);
    CHECK(mixed.f_score >= 0.0);
    CHECK(mixed.f_score <= 1.0);
    // F = 0 iff TP = 0.
    CHECK(mixed.f_score > 0.0);
}

TEST_CASE("ground truth JSON round trip") {
    eval::GroundTruth truth;
    truth.fixing[{System::JiraIssue, "K-1"}] = commit_n(1);
    truth.fixing[{System::GithubIssue, "2"}] = std::nullopt;
    truth.inducing[commit_n(1)] = {commit_n(3), commit_n(4)};

    auto json = truth.to_json();
    auto back = eval::GroundTruth::from_json(json);
    CHECK(back.fixing == truth.fixing);
    CHECK(back.inducing == truth.inducing);
    CHECK(json.at("fixing").at("github:2").is_null());
}

TEST_CASE("dataset writer: header, sorting, determinism") {
    auto result = result_for(commit_n(7), {commit_n(2), commit_n(1)});
    result.suspects[0].secured = true;
    trace::FineGrainedEntry entry;
    entry.level = trace::GrainLevel::File;
    entry.inducing_commit = commit_n(2);
    entry.path = "src/a.java";
    entry.fix_path = "src/a.java";
    result.fine_grained.push_back(entry);

    auto commit_csv = eval::render_dataset({result}, trace::GrainLevel::Commit);
    auto lines = prszz::strings::split_lines(commit_csv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "level,bug_system,bug_key,variant,fixing_commit,"
                      "inducing_commit,path,method_header,secured");
    // Sorted by inducing commit.
    CHECK(lines[1].find(commit_n(1).hex()) != std::string_view::npos);
    CHECK(lines[2].find(commit_n(2).hex()) != std::string_view::npos);
    CHECK(lines[2].find("true") != std::string_view::npos);

    CHECK(eval::render_dataset({result}, trace::GrainLevel::Commit) == commit_csv);

    auto file_csv = eval::render_dataset({result}, trace::GrainLevel::File);
    CHECK(prszz::strings::split_lines(file_csv).size() == 2);

    CHECK(prszz::strings::split_lines(
              eval::render_dataset({}, trace::GrainLevel::Commit))
              .size() == 1); // header-only
}

TEST_CASE("dataset writer: selection variants emit only the selected commit") {
    auto result = result_for(commit_n(7), {commit_n(1), commit_n(2)}, commit_n(2));
    result.variant = trace::VariantId::make(trace::VariantName::R);
    auto csv = eval::render_dataset({result}, trace::GrainLevel::Commit);
    auto lines = prszz::strings::split_lines(csv);
    REQUIRE(lines.size() == 2);
    CHECK(lines[1].find(commit_n(2).hex()) != std::string_view::npos);
}
