#include "prszz/vcs/object_store.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/zstream.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <functional>

namespace prszz::vcs {

namespace fs = std::filesystem;

namespace {

std::string read_binary_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CorruptObjectDatabase("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return data;
}

std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::uint64_t be64(const unsigned char* p) {
    return (std::uint64_t(be32(p)) << 32) | be32(p + 4);
}

// Pack object type codes.
enum PackType {
    kCommit = 1,
    kTree = 2,
    kBlob = 3,
    kTag = 4,
    kOfsDelta = 6,
    kRefDelta = 7,
};

std::uint64_t parse_delta_size(std::string_view data, std::size_t& pos) {
    std::uint64_t size = 0;
    int shift = 0;
    while (pos < data.size()) {
        unsigned char b = static_cast<unsigned char>(data[pos++]);
        size |= std::uint64_t(b & 0x7f) << shift;
        shift += 7;
        if ((b & 0x80) == 0)
            break;
    }
    return size;
}

std::string apply_delta(std::string_view base, std::string_view delta) {
    std::size_t pos = 0;
    std::uint64_t src_size = parse_delta_size(delta, pos);
    std::uint64_t dst_size = parse_delta_size(delta, pos);
    if (src_size != base.size())
        throw CorruptObjectDatabase("delta base size mismatch");

    std::string out;
    out.reserve(dst_size);
    while (pos < delta.size()) {
        unsigned char cmd = static_cast<unsigned char>(delta[pos++]);
        if (cmd & 0x80) {
            // copy from base
            std::uint64_t offset = 0, size = 0;
            for (int i = 0; i < 4; ++i)
                if (cmd & (1u << i))
                    offset |= std::uint64_t(
                                  static_cast<unsigned char>(delta[pos++]))
                              << (8 * i);
            for (int i = 0; i < 3; ++i)
                if (cmd & (1u << (4 + i)))
                    size |= std::uint64_t(
                                static_cast<unsigned char>(delta[pos++]))
                            << (8 * i);
            if (size == 0)
                size = 0x10000;
            if (offset + size > base.size())
                throw CorruptObjectDatabase("delta copy out of range");
            out.append(base.substr(offset, size));
        } else if (cmd != 0) {
            // insert literal bytes
            if (pos + cmd > delta.size())
                throw CorruptObjectDatabase("delta literal out of range");
            out.append(delta.substr(pos, cmd));
            pos += cmd;
        } else {
            throw CorruptObjectDatabase("delta opcode 0");
        }
    }
    if (out.size() != dst_size)
        throw CorruptObjectDatabase("delta result size mismatch");
    return out;
}

} // namespace

ObjectStore::ObjectStore(fs::path objects_dir)
    : objects_dir_(std::move(objects_dir)) {
    load_pack_indexes();
}

void ObjectStore::load_pack_indexes() {
    fs::path pack_dir = objects_dir_ / "pack";
    if (!fs::is_directory(pack_dir))
        return;

    std::vector<fs::path> idx_files;
    for (const auto& entry : fs::directory_iterator(pack_dir))
        if (entry.path().extension() == ".idx")
            idx_files.push_back(entry.path());
    std::sort(idx_files.begin(), idx_files.end());

    for (const auto& idx_path : idx_files) {
        std::string data = read_binary_file(idx_path);
        const auto* p = reinterpret_cast<const unsigned char*>(data.data());
        if (data.size() < 8 + 256 * 4)
            throw CorruptObjectDatabase("truncated pack index " + idx_path.string());
        if (be32(p) != 0xff744f63u)
            throw CorruptObjectDatabase("pack index v1 not supported: " +
                                        idx_path.string());
        if (be32(p + 4) != 2)
            throw CorruptObjectDatabase("unsupported pack index version");

        std::size_t count = be32(p + 8 + 255 * 4);
        std::size_t ids_off = 8 + 256 * 4;
        std::size_t crc_off = ids_off + count * 20;
        std::size_t ofs_off = crc_off + count * 4;
        std::size_t big_off = ofs_off + count * 4;
        if (big_off > data.size())
            throw CorruptObjectDatabase("truncated pack index " + idx_path.string());

        PackIndex pack;
        pack.pack_path = idx_path;
        pack.pack_path.replace_extension(".pack");
        pack.ids.reserve(count);
        pack.offsets.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            pack.ids.push_back(ObjectId::from_raw(p + ids_off + i * 20));
            std::uint32_t off = be32(p + ofs_off + i * 4);
            if (off & 0x80000000u) {
                std::size_t big_index = off & 0x7fffffffu;
                pack.offsets.push_back(be64(p + big_off + big_index * 8));
            } else {
                pack.offsets.push_back(off);
            }
        }
        packs_.push_back(std::move(pack));
    }
}

std::optional<std::uint64_t> ObjectStore::PackIndex::find(const ObjectId& id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id)
        return std::nullopt;
    return offsets[static_cast<std::size_t>(it - ids.begin())];
}

std::optional<RawObject> ObjectStore::read_loose(const ObjectId& id) const {
    std::string hex = id.hex();
    fs::path path = objects_dir_ / hex.substr(0, 2) / hex.substr(2);
    std::error_code ec;
    if (!fs::exists(path, ec))
        return std::nullopt;

    std::string inflated = zstream::inflate(read_binary_file(path));
    auto nul = inflated.find('\0');
    auto sp = inflated.find(' ');
    if (nul == std::string::npos || sp == std::string::npos || sp > nul)
        throw CorruptObjectDatabase("malformed loose object header " + hex);

    RawObject obj;
    obj.type = parse_object_type(std::string_view(inflated).substr(0, sp));
    obj.data = inflated.substr(nul + 1);
    return obj;
}

RawObject ObjectStore::read_pack_entry(const PackIndex& pack,
                                       std::uint64_t offset) const {
    std::shared_ptr<const std::string> data_holder;
    {
        std::lock_guard lock(mutex_);
        if (!pack.data)
            pack.data = std::make_shared<const std::string>(
                read_binary_file(pack.pack_path));
        data_holder = pack.data;
    }
    const std::string& data = *data_holder;
    if (data.size() < 12 ||
        std::memcmp(data.data(), "PACK", 4) != 0)
        throw CorruptObjectDatabase("malformed pack " + pack.pack_path.string());

    std::function<RawObject(std::uint64_t)> read_at =
        [&](std::uint64_t at) -> RawObject {
        if (at >= data.size())
            throw CorruptObjectDatabase("pack offset out of range");
        std::size_t pos = at;
        unsigned char b = static_cast<unsigned char>(data[pos++]);
        int type = (b >> 4) & 0x7;
        std::uint64_t size = b & 0x0f;
        int shift = 4;
        while (b & 0x80) {
            b = static_cast<unsigned char>(data[pos++]);
            size |= std::uint64_t(b & 0x7f) << shift;
            shift += 7;
        }

        switch (type) {
        case kCommit:
        case kTree:
        case kBlob:
        case kTag: {
            RawObject obj;
            obj.type = type == kCommit  ? ObjectType::Commit
                       : type == kTree ? ObjectType::Tree
                       : type == kBlob ? ObjectType::Blob
                                       : ObjectType::Tag;
            obj.data = zstream::inflate_prefix(
                std::string_view(data).substr(pos), nullptr);
            if (obj.data.size() != size)
                throw CorruptObjectDatabase("pack entry size mismatch");
            return obj;
        }
        case kOfsDelta: {
            b = static_cast<unsigned char>(data[pos++]);
            std::uint64_t neg = b & 0x7f;
            while (b & 0x80) {
                b = static_cast<unsigned char>(data[pos++]);
                neg = ((neg + 1) << 7) | (b & 0x7f);
            }
            RawObject base = read_at(at - neg);
            std::string delta = zstream::inflate_prefix(
                std::string_view(data).substr(pos), nullptr);
            return RawObject{base.type, apply_delta(base.data, delta)};
        }
        case kRefDelta: {
            ObjectId base_id = ObjectId::from_raw(
                reinterpret_cast<const unsigned char*>(data.data() + pos));
            pos += 20;
            auto base = read(base_id);
            std::string delta = zstream::inflate_prefix(
                std::string_view(data).substr(pos), nullptr);
            return RawObject{base->type, apply_delta(base->data, delta)};
        }
        default:
            throw CorruptObjectDatabase("unknown pack entry type " +
                                        std::to_string(type));
        }
    };

    return read_at(offset);
}

std::optional<RawObject> ObjectStore::read_packed(const ObjectId& id) const {
    for (const auto& pack : packs_) {
        if (auto offset = pack.find(id))
            return read_pack_entry(pack, *offset);
    }
    return std::nullopt;
}

std::optional<std::shared_ptr<const RawObject>>
ObjectStore::try_read(const ObjectId& id) const {
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(id);
        if (it != cache_.end())
            return it->second;
    }

    std::optional<RawObject> obj = read_loose(id);
    if (!obj)
        obj = read_packed(id);
    if (!obj)
        return std::nullopt;

    auto shared = std::make_shared<const RawObject>(std::move(*obj));
    std::lock_guard lock(mutex_);
    cache_.emplace(id, shared);
    return shared;
}

std::shared_ptr<const RawObject> ObjectStore::read(const ObjectId& id) const {
    auto obj = try_read(id);
    if (!obj)
        throw UnknownCommit("object not found: " + id.hex());
    return *obj;
}

bool ObjectStore::contains(const ObjectId& id) const {
    return try_read(id).has_value();
}

} // namespace prszz::vcs
