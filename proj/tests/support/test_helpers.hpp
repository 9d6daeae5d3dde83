#pragma once

#include "prszz/fixture/git_writer.hpp"
#include "prszz/vcs/object_id.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace testsupport {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

// Fixed identities and stepping timestamps make every object id reproducible.
inline constexpr std::int64_t kEpochBase = 1600000000;
inline constexpr std::int64_t kEpochStep = 1000;

prszz::vcs::Signature test_signature(std::int64_t time,
                                     const std::string& name = "Fixture Bot",
                                     const std::string& email =
                                         "fixture@example.invalid");

// Small builder over GitRepoWriter with branch support. Content merges are
// plain overlays (tests only merge branches with disjoint edits).
class RepoBuilder {
public:
    explicit RepoBuilder(const fs::path& dir, const std::string& branch = "main");

    // nullopt value = delete the path.
    using Changes = std::map<std::string, std::optional<prszz::fixture::FileState>>;

    prszz::vcs::ObjectId commit(const std::string& message, const Changes& changes);

    void checkout(const std::string& branch); // creates from current state
    // Overlay merge; `extra` models conflict-resolution edits belonging to
    // the merge commit itself.
    prszz::vcs::ObjectId merge(const std::string& other_branch,
                               const std::string& message,
                               const Changes& extra = {});

    prszz::vcs::ObjectId head() const;
    const prszz::fixture::FileTree& files() const;
    std::int64_t next_time() const { return time_; }
    const fs::path& dir() const { return dir_; }

private:
    struct Branch {
        prszz::fixture::FileTree files;
        std::optional<prszz::vcs::ObjectId> head;
    };

    fs::path dir_;
    prszz::fixture::GitRepoWriter writer_;
    std::map<std::string, Branch> branches_;
    std::string current_;
    std::int64_t time_ = kEpochBase;
};

struct GitResult {
    int exit_code = -1;
    std::string output;
};

// Runs the system git binary against a repository; used as the independent
// oracle for blame/diff behaviour.
GitResult run_git(const fs::path& repo_dir, const std::vector<std::string>& args);

// Parses `git blame --porcelain` output into per-line (commit, origin line).
std::vector<std::pair<std::string, int>>
parse_blame_porcelain(const std::string& output);

fs::path test_data_dir();

} // namespace testsupport
