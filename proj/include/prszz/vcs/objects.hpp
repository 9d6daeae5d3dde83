#pragma once

#include "prszz/vcs/object_id.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace prszz::vcs {

enum class ObjectType { Commit, Tree, Blob, Tag };

struct RawObject {
    ObjectType type;
    std::string data;
};

struct Signature {
    std::string name;
    std::string email;
    std::int64_t time = 0; // UTC epoch seconds
    std::string tz = "+0000";
};

struct Commit {
    ObjectId id;
    ObjectId tree;
    std::vector<ObjectId> parents;
    Signature author;
    Signature committer;
    std::string message;

    bool is_merge() const { return parents.size() >= 2; }
    std::int64_t commit_time() const { return committer.time; }
    std::int64_t author_time() const { return author.time; }
};

// Git filemode constants as stored in tree entries.
namespace filemode {
constexpr std::uint32_t regular = 0100644;
constexpr std::uint32_t executable = 0100755;
constexpr std::uint32_t symlink = 0120000;
constexpr std::uint32_t tree = 0040000;
constexpr std::uint32_t gitlink = 0160000;
} // namespace filemode

struct TreeEntry {
    std::uint32_t mode = 0;
    std::string name;
    ObjectId id;

    bool is_tree() const { return mode == filemode::tree; }
};

ObjectType parse_object_type(std::string_view name);
std::string_view object_type_name(ObjectType type);

Commit parse_commit(const ObjectId& id, std::string_view data);
std::vector<TreeEntry> parse_tree(std::string_view data);

} // namespace prszz::vcs
