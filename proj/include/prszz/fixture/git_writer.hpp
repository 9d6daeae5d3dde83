#pragma once

#include "prszz/vcs/objects.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace prszz::fixture {

struct FileState {
    std::string content;
    bool executable = false;
};

// Working-tree snapshot: repo-relative path -> file state.
using FileTree = std::map<std::string, FileState>;

struct CommitSpec {
    vcs::ObjectId tree;
    std::vector<vcs::ObjectId> parents;
    vcs::Signature author;
    vcs::Signature committer;
    std::string message;
};

// Serialization of git objects (header + payload) and their content ids,
// usable with or without persisting anything. Shadow commits (inner commits
// of squashed/rebased pull requests) are hashed but never stored.
namespace gitobj {
std::string blob_object(std::string_view content);
std::string commit_object(const CommitSpec& spec);
vcs::ObjectId id_of(std::string_view object_bytes);
} // namespace gitobj

// Writes loose objects and refs of a standard git repository. Creates the
// layout on construction; repositories produced here are readable by the
// system git binary.
class GitRepoWriter {
public:
    static GitRepoWriter init(const std::filesystem::path& dir,
                              const std::string& default_branch = "main",
                              bool bare = false);

    const std::filesystem::path& git_dir() const { return git_dir_; }

    vcs::ObjectId write_blob(std::string_view content);
    vcs::ObjectId write_tree(const FileTree& files);
    vcs::ObjectId write_commit(const CommitSpec& spec);

    // Content ids the repository would have, without storing objects.
    static vcs::ObjectId hash_tree(const FileTree& files);
    static vcs::ObjectId hash_commit(const CommitSpec& spec);

    void update_ref(const std::string& name, const vcs::ObjectId& id);
    void delete_ref(const std::string& name);
    void set_head(const std::string& branch);

private:
    explicit GitRepoWriter(std::filesystem::path git_dir);

    vcs::ObjectId store_object(std::string_view object_bytes);

    std::filesystem::path git_dir_;
};

} // namespace prszz::fixture
