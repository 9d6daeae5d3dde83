#pragma once

#include "prszz/vcs/object_store.hpp"
#include "prszz/vcs/objects.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace prszz::vcs {

// Read-only view of a git repository (worktree or bare). Never mutates the
// repository; safe for concurrent reads.
class Repository {
public:
    static Repository open(const std::filesystem::path& path);

    const std::filesystem::path& git_dir() const { return git_dir_; }

    bool has_object(const ObjectId& id) const;
    bool has_commit(const ObjectId& id) const;

    std::shared_ptr<const Commit> commit(const ObjectId& id) const;
    std::vector<TreeEntry> tree_entries(const ObjectId& tree_id) const;
    std::string blob(const ObjectId& id) const;

    std::optional<ObjectId> head() const;
    // HEAD plus all local branch heads, deduplicated, deterministic order.
    std::vector<ObjectId> head_commits() const;

    struct PathEntry {
        std::uint32_t mode = 0;
        ObjectId id;
    };

    std::optional<PathEntry> entry_at(const ObjectId& commit_id,
                                      std::string_view path) const;
    // Throws PathNotPresent when the file does not exist at that commit.
    std::string file_at(const ObjectId& commit_id, std::string_view path) const;

    // Recursive listing of blob entries: repo-relative path -> entry.
    using FlatTree = std::map<std::string, PathEntry>;
    std::shared_ptr<const FlatTree> flatten_commit(const ObjectId& commit_id) const;

    // All commits reachable from head_commits(), newest first
    // (commit_time desc, id asc). Deterministic.
    std::vector<ObjectId> all_commits() const;

    std::vector<ObjectId> first_parent_chain(const ObjectId& from) const;
    bool is_ancestor(const ObjectId& ancestor, const ObjectId& descendant) const;

private:
    explicit Repository(std::filesystem::path git_dir);

    FlatTree flatten_tree(const ObjectId& tree_id, const std::string& prefix) const;
    std::optional<ObjectId> resolve_ref(const std::string& name) const;
    std::vector<std::pair<std::string, ObjectId>> branch_refs() const;

    struct CacheState {
        std::mutex mutex;
        std::unordered_map<ObjectId, std::shared_ptr<const Commit>, ObjectIdHash>
            commits;
        std::unordered_map<ObjectId, std::shared_ptr<const FlatTree>, ObjectIdHash>
            flats;
    };

    std::filesystem::path git_dir_;
    std::shared_ptr<ObjectStore> store_;
    std::shared_ptr<CacheState> caches_;
};

} // namespace prszz::vcs
