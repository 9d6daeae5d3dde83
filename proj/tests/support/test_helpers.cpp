#include "support/test_helpers.hpp"

#include "prszz/support/strings.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <stdexcept>

namespace testsupport {

using prszz::fixture::CommitSpec;
using prszz::vcs::ObjectId;

TempDir::TempDir() {
    auto base = fs::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto candidate = base / ("prszz-test-" + std::to_string(rd()));
        std::error_code ec;
        if (fs::create_directory(candidate, ec)) {
            path_ = candidate;
            return;
        }
    }
    throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

prszz::vcs::Signature test_signature(std::int64_t time, const std::string& name,
                                     const std::string& email) {
    prszz::vcs::Signature sig;
    sig.name = name;
    sig.email = email;
    sig.time = time;
    sig.tz = "+0000";
    return sig;
}

RepoBuilder::RepoBuilder(const fs::path& dir, const std::string& branch)
    : dir_(dir), writer_(prszz::fixture::GitRepoWriter::init(dir, branch)),
      current_(branch) {
    branches_[branch] = Branch{};
}

ObjectId RepoBuilder::commit(const std::string& message, const Changes& changes) {
    Branch& branch = branches_.at(current_);
    for (const auto& [path, state] : changes) {
        if (state)
            branch.files[path] = *state;
        else
            branch.files.erase(path);
    }

    CommitSpec spec;
    spec.tree = writer_.write_tree(branch.files);
    if (branch.head)
        spec.parents.push_back(*branch.head);
    spec.author = test_signature(time_);
    spec.committer = test_signature(time_);
    spec.message = message + "\n";
    time_ += kEpochStep;

    ObjectId id = writer_.write_commit(spec);
    branch.head = id;
    writer_.update_ref("refs/heads/" + current_, id);
    return id;
}

void RepoBuilder::checkout(const std::string& branch) {
    if (!branches_.contains(branch))
        branches_[branch] = branches_.at(current_);
    current_ = branch;
    writer_.set_head(branch);
    if (branches_.at(branch).head)
        writer_.update_ref("refs/heads/" + branch, *branches_.at(branch).head);
}

ObjectId RepoBuilder::merge(const std::string& other_branch,
                            const std::string& message, const Changes& extra) {
    Branch& ours = branches_.at(current_);
    const Branch& theirs = branches_.at(other_branch);

    // Overlay merge: their files win on touched paths.
    for (const auto& [path, state] : theirs.files)
        ours.files[path] = state;
    for (const auto& [path, state] : extra) {
        if (state)
            ours.files[path] = *state;
        else
            ours.files.erase(path);
    }

    CommitSpec spec;
    spec.tree = writer_.write_tree(ours.files);
    if (ours.head)
        spec.parents.push_back(*ours.head);
    if (theirs.head)
        spec.parents.push_back(*theirs.head);
    spec.author = test_signature(time_);
    spec.committer = test_signature(time_);
    spec.message = message + "\n";
    time_ += kEpochStep;

    ObjectId id = writer_.write_commit(spec);
    ours.head = id;
    writer_.update_ref("refs/heads/" + current_, id);
    return id;
}

ObjectId RepoBuilder::head() const {
    return branches_.at(current_).head.value();
}

const prszz::fixture::FileTree& RepoBuilder::files() const {
    return branches_.at(current_).files;
}

GitResult run_git(const fs::path& repo_dir, const std::vector<std::string>& args) {
    std::string cmd = "git -C '" + repo_dir.string() + "'";
    for (const auto& arg : args) {
        cmd += " '";
        cmd += arg;
        cmd += "'";
    }
    cmd += " 2>&1";

    GitResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr)
        return result;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), n);
    result.exit_code = pclose(pipe);
    return result;
}

std::vector<std::pair<std::string, int>>
parse_blame_porcelain(const std::string& output) {
    std::vector<std::pair<std::string, int>> lines;
    for (auto line : prszz::strings::split_lines(output)) {
        // Header lines look like "<40-hex> <orig line> <final line> [count]".
        if (line.size() < 45 || line[40] != ' ')
            continue;
        bool is_hex = true;
        for (std::size_t i = 0; i < 40 && is_hex; ++i)
            is_hex = std::isxdigit(static_cast<unsigned char>(line[i])) != 0;
        if (!is_hex)
            continue;
        auto fields = prszz::strings::split(line.substr(41), ' ');
        if (fields.empty())
            continue;
        int orig_line = 0;
        std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(),
                        orig_line);
        lines.emplace_back(std::string(line.substr(0, 40)), orig_line);
    }
    return lines;
}

fs::path test_data_dir() {
    const char* env = std::getenv("PRSZZ_TEST_DATA");
    if (env != nullptr)
        return fs::path(env);
    return fs::current_path() / "tests" / "fixtures";
}

} // namespace testsupport
