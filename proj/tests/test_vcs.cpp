#include <doctest.h>

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"
#include "prszz/vcs/blame.hpp"
#include "prszz/vcs/diff.hpp"
#include "prszz/vcs/line_map.hpp"
#include "prszz/vcs/repository.hpp"
#include "support/test_helpers.hpp"

#include <algorithm>

using namespace prszz;
using namespace testsupport;
using prszz::fixture::FileState;
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

} // namespace

TEST_CASE("open_repository on a fixture repo") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit("initial", {{"a.txt", FileState{lines({"hello"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    CHECK(repo.head().has_value());
    CHECK(repo.all_commits().size() == 1);
}

TEST_CASE("open_repository rejects an empty dir") {
    TempDir tmp;
    CHECK_THROWS_AS(vcs::Repository::open(tmp.path()), NotARepository);
    CHECK_THROWS_AS(vcs::Repository::open(tmp.path() / "missing"),
                    NotARepository);
}

TEST_CASE("open_repository accepts a bare repository") {
    TempDir tmp;
    auto writer = fixture::GitRepoWriter::init(tmp.path(), "main", /*bare=*/true);
    fixture::CommitSpec spec;
    spec.tree = writer.write_tree({{"f", FileState{"x\n"}}});
    spec.author = test_signature(kEpochBase);
    spec.committer = spec.author;
    spec.message = "root\n";
    auto id = writer.write_commit(spec);
    writer.update_ref("refs/heads/main", id);

    auto repo = vcs::Repository::open(tmp.path());
    REQUIRE(repo.head().has_value());
    CHECK(*repo.head() == id);
}

TEST_CASE("written repositories satisfy git fsck") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit("one", {{"a.txt", FileState{lines({"a", "b"})}}});
    builder.commit("two", {{"dir/b.txt", FileState{lines({"c"})}}});

    auto fsck = run_git(tmp.path(), {"fsck", "--strict"});
    CHECK_MESSAGE(fsck.exit_code == 0, fsck.output);
}

TEST_CASE("diff_commits: single line edit yields one hunk") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit(
        "base", {{"a.txt", FileState{lines({"one", "two", "three"})}}});
    auto c2 = builder.commit(
        "edit", {{"a.txt", FileState{lines({"one", "TWO", "three"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    auto diffs = vcs::diff_commits(repo, c1, c2);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].change_kind == vcs::ChangeKind::Modified);
    REQUIRE(diffs[0].hunks.size() == 1);
    const auto& hunk = diffs[0].hunks[0];
    REQUIRE(hunk.removed.size() == 1);
    REQUIRE(hunk.added.size() == 1);
    CHECK(hunk.removed[0] == std::pair<int, std::string>{2, "two"});
    CHECK(hunk.added[0] == std::pair<int, std::string>{2, "TWO"});
}

TEST_CASE("diff_commits of a commit with itself is empty") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit("base", {{"a.txt", FileState{"x\n"}}});

    auto repo = vcs::Repository::open(tmp.path());
    CHECK(vcs::diff_commits(repo, c1, c1).empty());
}

TEST_CASE("diff_commits detects a pure rename; agrees with git diff -M") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    std::string content = lines({"alpha", "beta", "gamma", "delta"});
    auto c1 = builder.commit("base", {{"old_name.txt", FileState{content}}});
    auto c2 = builder.commit("rename", {{"old_name.txt", std::nullopt},
                                        {"new_name.txt", FileState{content}}});

    auto repo = vcs::Repository::open(tmp.path());
    auto diffs = vcs::diff_commits(repo, c1, c2);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].change_kind == vcs::ChangeKind::Renamed);
    CHECK(diffs[0].old_path == "old_name.txt");
    CHECK(diffs[0].new_path == "new_name.txt");
    CHECK(diffs[0].hunks.empty());

    auto external = run_git(
        tmp.path(), {"diff", "-M", "--name-status", c1.hex(), c2.hex()});
    CHECK(external.output.find("R100") != std::string::npos);
    CHECK(external.output.find("new_name.txt") != std::string::npos);
}

TEST_CASE("diff_commits: unrelated file changes are not renames") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit("base", {{"a.txt", FileState{lines({"1", "2"})}}});
    auto c2 = builder.commit("swap", {{"a.txt", std::nullopt},
                                      {"b.txt", FileState{lines({"x", "y", "z"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    auto diffs = vcs::diff_commits(repo, c1, c2);
    REQUIRE(diffs.size() == 2);
    CHECK(diffs[0].change_kind == vcs::ChangeKind::Deleted);
    CHECK(diffs[1].change_kind == vcs::ChangeKind::Added);
}

TEST_CASE("diff determinism") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit("base", {{"a.txt", FileState{lines({"a", "b", "c"})}},
                                      {"b.txt", FileState{lines({"q"})}}});
    auto c2 = builder.commit("next", {{"a.txt", FileState{lines({"a", "x", "c", "d"})}},
                                      {"b.txt", std::nullopt},
                                      {"c.txt", FileState{lines({"q", "r"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    auto first = vcs::diff_commits(repo, c1, c2);
    auto second = vcs::diff_commits(repo, c1, c2);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].old_path == second[i].old_path);
        CHECK(first[i].new_path == second[i].new_path);
        CHECK(first[i].change_kind == second[i].change_kind);
        CHECK(first[i].hunks.size() == second[i].hunks.size());
    }
}

TEST_CASE("blame_lines: line introduced mid-history") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit("c1", {{"a.txt", FileState{lines({"l1", "l3"})}}});
    auto c2 = builder.commit("c2", {{"a.txt", FileState{lines({"l1", "l2", "l3"})}}});
    auto c3 = builder.commit("c3", {{"b.txt", FileState{lines({"other"})}}});
    auto c4 = builder.commit("c4", {{"a.txt", FileState{lines({"l1", "l2", "l3", "l4"})}}});
    auto c5 = builder.commit("c5", {{"b.txt", FileState{lines({"other", "more"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    auto origins = vcs::blame_lines(repo, c5, "a.txt", {1, 2, 3, 4});
    REQUIRE(origins.size() == 4);
    CHECK(origins[0].origin_commit == c1);
    CHECK(origins[1].origin_commit == c2);
    CHECK(origins[2].origin_commit == c1);
    CHECK(origins[3].origin_commit == c4);
    CHECK(origins[1].origin_line == 2);

    // Cross-check every line against system git blame.
    auto external =
        run_git(tmp.path(), {"blame", "--porcelain", c5.hex(), "--", "a.txt"});
    auto expected = parse_blame_porcelain(external.output);
    REQUIRE(expected.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(origins[i].origin_commit.hex() == expected[i].first);
        CHECK(origins[i].origin_line == expected[i].second);
    }
    (void)c3;
}

TEST_CASE("blame_lines: file-introducing commit blames itself") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit("c1", {{"a.txt", FileState{lines({"x", "y"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    for (const auto& origin : vcs::blame_lines(repo, c1, "a.txt", {1, 2})) {
        CHECK(origin.origin_commit == c1);
        CHECK(origin.origin_line == origin.line);
    }
}

TEST_CASE("blame_lines: merge-parent branch edits are attributed to the branch") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit("base", {{"a.txt", FileState{lines({"one", "two", "three"})}}});
    builder.checkout("feature");
    auto feature_edit = builder.commit(
        "feature edit", {{"a.txt", FileState{lines({"one", "two!", "three"})}}});
    builder.checkout("main");
    builder.commit("main side", {{"c.txt", FileState{lines({"main"})}}});
    auto merge = builder.merge("feature", "merge feature");

    auto repo = vcs::Repository::open(tmp.path());
    auto origins = vcs::blame_lines(repo, merge, "a.txt", {2});
    REQUIRE(origins.size() == 1);
    CHECK(origins[0].origin_commit == feature_edit);

    auto external =
        run_git(tmp.path(), {"blame", "--porcelain", merge.hex(), "--", "a.txt"});
    auto expected = parse_blame_porcelain(external.output);
    REQUIRE(expected.size() == 3);
    CHECK(expected[1].first == feature_edit.hex());
}

TEST_CASE("blame_lines error taxonomy") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit("c1", {{"a.txt", FileState{"x\n"}}});

    auto repo = vcs::Repository::open(tmp.path());
    CHECK_THROWS_AS(vcs::blame_lines(repo, c1, "nope.txt", {1}), PathNotPresent);
    CHECK_THROWS_AS(vcs::blame_lines(repo, c1, "a.txt", {2}), LineOutOfRange);
    ObjectId missing = ObjectId::parse(std::string(40, 'f')).value();
    CHECK_THROWS_AS(vcs::blame_lines(repo, missing, "a.txt", {1}), UnknownCommit);
}

TEST_CASE("blame agrees with git blame line-for-line on a 50-commit fixture") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());

    // Deterministic pseudo-random edit history over two files.
    std::vector<std::string> file_a{"a0", "a1", "a2", "a3", "a4", "a5"};
    std::vector<std::string> file_b{"b0", "b1", "b2"};
    std::uint64_t state = 42;
    auto next = [&state](std::uint64_t bound) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return (state >> 33) % bound;
    };

    auto render = [&](const std::vector<std::string>& v) {
        std::string out;
        for (const auto& l : v)
            out += l + "\n";
        return out;
    };

    builder.commit("init", {{"a.txt", FileState{render(file_a)}},
                            {"b.txt", FileState{render(file_b)}}});
    for (int i = 1; i < 50; ++i) {
        auto& file = (next(2) == 0) ? file_a : file_b;
        const char* name = (&file == &file_a) ? "a.txt" : "b.txt";
        switch (next(3)) {
        case 0: // edit a line
            file[next(file.size())] += "!";
            break;
        case 1: // insert a line
            file.insert(file.begin() + static_cast<long>(next(file.size() + 1)),
                        "new" + std::to_string(i));
            break;
        default: // delete a line (keep at least two)
            if (file.size() > 2)
                file.erase(file.begin() + static_cast<long>(next(file.size())));
            break;
        }
        builder.commit("step " + std::to_string(i),
                       {{name, FileState{render(file)}}});
    }

    auto head = builder.head();
    auto repo = vcs::Repository::open(tmp.path());
    for (const char* path : {"a.txt", "b.txt"}) {
        auto ours = vcs::blame_file(repo, head, path);
        auto external = run_git(
            tmp.path(), {"blame", "--porcelain", head.hex(), "--", path});
        auto expected = parse_blame_porcelain(external.output);
        REQUIRE(ours.size() == expected.size());
        for (std::size_t i = 0; i < ours.size(); ++i) {
            CAPTURE(path);
            CAPTURE(i);
            CHECK(ours[i].origin_commit.hex() == expected[i].first);
            CHECK(ours[i].origin_line == expected[i].second);
        }
    }
}

TEST_CASE("blame/diff consistency: removed lines blame to an ancestor") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit("c1", {{"a.txt", FileState{lines({"p", "q", "r"})}}});
    auto c2 = builder.commit("c2", {{"a.txt", FileState{lines({"p", "q2", "r"})}}});
    auto c3 = builder.commit("c3", {{"a.txt", FileState{lines({"p", "q3", "r"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    for (const auto& diff : vcs::diff_commits(repo, c2, c3)) {
        for (const auto& hunk : diff.hunks) {
            for (const auto& [line, text] : hunk.removed) {
                auto origins =
                    vcs::blame_lines(repo, c2, *diff.old_path, {line});
                REQUIRE(origins.size() == 1);
                CHECK(origins[0].origin_commit != c3);
                CHECK(repo.is_ancestor(origins[0].origin_commit, c2));
            }
        }
    }
    (void)c1;
}

TEST_CASE("map_line_across: insertion offset") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    std::vector<std::string> content;
    for (int i = 1; i <= 12; ++i)
        content.push_back("line" + std::to_string(i));
    std::string base_text;
    for (const auto& l : content)
        base_text += l + "\n";
    auto to = builder.commit("to", {{"f.txt", FileState{base_text}}});

    // Insert 3 lines above (old) line 7 so old line 7 becomes line 10.
    std::vector<std::string> edited = content;
    edited.insert(edited.begin() + 6, {"ins1", "ins2", "ins3"});
    std::string edited_text;
    for (const auto& l : edited)
        edited_text += l + "\n";
    auto from = builder.commit("from", {{"f.txt", FileState{edited_text}}});

    auto repo = vcs::Repository::open(tmp.path());
    auto mapped = vcs::map_line_across(repo, from, to, "f.txt", 10);
    REQUIRE(mapped.has_value());
    CHECK(mapped->path == "f.txt");
    CHECK(mapped->line == 7);
}

TEST_CASE("map_line_across: line added after `to` vanishes") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto to = builder.commit("to", {{"f.txt", FileState{lines({"a", "b"})}}});
    auto from = builder.commit("from", {{"f.txt", FileState{lines({"a", "new", "b"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    CHECK_FALSE(vcs::map_line_across(repo, from, to, "f.txt", 2).has_value());
    CHECK(vcs::map_line_across(repo, from, to, "f.txt", 3).has_value());
}

TEST_CASE("map_line_across follows renames and preserves text") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    std::string content = lines({"k1", "k2", "k3", "k4"});
    auto to = builder.commit("to", {{"before.txt", FileState{content}}});
    auto mid = builder.commit("rename", {{"before.txt", std::nullopt},
                                         {"after.txt", FileState{content}}});
    auto from = builder.commit(
        "edit tail", {{"after.txt", FileState{lines({"k1", "k2", "k3", "k4", "k5"})}}});

    auto repo = vcs::Repository::open(tmp.path());
    auto mapped = vcs::map_line_across(repo, from, to, "after.txt", 3);
    REQUIRE(mapped.has_value());
    CHECK(mapped->path == "before.txt");
    CHECK(mapped->line == 3);

    auto text_at = [&](const ObjectId& commit, const std::string& path, int line) {
        auto file = repo.file_at(commit, path);
        auto ls = strings::split_lines(file);
        return std::string(ls[static_cast<std::size_t>(line - 1)]);
    };
    CHECK(text_at(from, "after.txt", 3) == text_at(to, mapped->path, mapped->line));
    (void)mid;
}

TEST_CASE("is_meta_change") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    builder.commit("base", {{"a.sh", FileState{lines({"echo hi"})}},
                            {"b.txt", FileState{lines({"text"})}}});
    auto exec_only = builder.commit(
        "make executable", {{"a.sh", FileState{lines({"echo hi"}), true}}});
    auto edit = builder.commit("edit", {{"b.txt", FileState{lines({"text2"})}}});
    builder.checkout("side");
    builder.commit("side edit", {{"c.txt", FileState{lines({"side"})}}});
    builder.checkout("main");
    auto merge = builder.merge("side", "merge side");

    auto repo = vcs::Repository::open(tmp.path());
    CHECK(vcs::is_meta_change(repo, merge));
    CHECK(vcs::is_meta_change(repo, exec_only));
    CHECK_FALSE(vcs::is_meta_change(repo, edit));
}

TEST_CASE("packed objects are readable after git repack") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    std::vector<ObjectId> commits;
    std::string content;
    for (int i = 0; i < 12; ++i) {
        content += "line" + std::to_string(i) + "\n";
        commits.push_back(
            builder.commit("c" + std::to_string(i), {{"f.txt", FileState{content}}}));
    }

    auto repack = run_git(tmp.path(), {"repack", "-adq"});
    REQUIRE_MESSAGE(repack.exit_code == 0, repack.output);
    // Loose objects are gone; everything must come from the pack.
    auto prune = run_git(tmp.path(), {"prune-packed"});
    REQUIRE(prune.exit_code == 0);

    auto repo = vcs::Repository::open(tmp.path());
    CHECK(repo.all_commits().size() == 12);
    auto origins = vcs::blame_lines(repo, commits.back(), "f.txt", {1, 12});
    REQUIRE(origins.size() == 2);
    CHECK(origins[0].origin_commit == commits[0]);
    CHECK(origins[1].origin_commit == commits[11]);
}

TEST_CASE("first_parent_chain and ancestry") {
    TempDir tmp;
    RepoBuilder builder(tmp.path());
    auto c1 = builder.commit("c1", {{"f", FileState{"1\n"}}});
    auto c2 = builder.commit("c2", {{"f", FileState{"2\n"}}});
    builder.checkout("side");
    auto s1 = builder.commit("s1", {{"g", FileState{"s\n"}}});
    builder.checkout("main");
    auto merge = builder.merge("side", "merge");

    auto repo = vcs::Repository::open(tmp.path());
    auto chain = repo.first_parent_chain(merge);
    REQUIRE(chain.size() == 3);
    CHECK(chain[0] == merge);
    CHECK(chain[1] == c2);
    CHECK(chain[2] == c1);
    CHECK(repo.is_ancestor(s1, merge));
    CHECK(repo.is_ancestor(c1, merge));
    CHECK_FALSE(repo.is_ancestor(merge, c1));
}
