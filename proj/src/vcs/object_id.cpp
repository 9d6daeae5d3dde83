#include "prszz/vcs/object_id.hpp"

#include "prszz/support/hashing.hpp"

#include <algorithm>
#include <cstring>

namespace prszz::vcs {

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

} // namespace

std::optional<ObjectId> ObjectId::parse(std::string_view hex) {
    if (hex.size() != 40)
        return std::nullopt;
    ObjectId id;
    for (std::size_t i = 0; i < 20; ++i) {
        int hi = hex_nibble(hex[2 * i]);
        int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        id.bytes_[i] = static_cast<unsigned char>((hi << 4) | lo);
    }
    return id;
}

ObjectId ObjectId::from_raw(const unsigned char* bytes20) {
    ObjectId id;
    std::memcpy(id.bytes_.data(), bytes20, 20);
    return id;
}

std::string ObjectId::hex() const {
    return hashing::to_hex(bytes_.data(), bytes_.size());
}

bool ObjectId::is_null() const noexcept {
    return std::all_of(bytes_.begin(), bytes_.end(),
                       [](unsigned char b) { return b == 0; });
}

} // namespace prszz::vcs
