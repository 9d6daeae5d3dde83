#pragma once

#include "prszz/vcs/objects.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace prszz::vcs {

// Read-only access to a git object database: loose objects plus pack files
// (idx v2). Thread-safe; results are cached.
class ObjectStore {
public:
    explicit ObjectStore(std::filesystem::path objects_dir);

    bool contains(const ObjectId& id) const;

    // Throws UnknownCommit if the object does not exist and
    // CorruptObjectDatabase on format damage.
    std::shared_ptr<const RawObject> read(const ObjectId& id) const;

    std::optional<std::shared_ptr<const RawObject>> try_read(const ObjectId& id) const;

private:
    struct PackIndex {
        std::filesystem::path pack_path;
        std::vector<ObjectId> ids;          // sorted
        std::vector<std::uint64_t> offsets; // parallel to ids
        mutable std::shared_ptr<const std::string> data; // loaded lazily
        std::optional<std::uint64_t> find(const ObjectId& id) const;
    };

    std::optional<RawObject> read_loose(const ObjectId& id) const;
    std::optional<RawObject> read_packed(const ObjectId& id) const;
    RawObject read_pack_entry(const PackIndex& pack, std::uint64_t offset) const;
    void load_pack_indexes();

    std::filesystem::path objects_dir_;
    std::vector<PackIndex> packs_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<ObjectId, std::shared_ptr<const RawObject>,
                               ObjectIdHash>
        cache_;
};

} // namespace prszz::vcs
