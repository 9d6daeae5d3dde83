#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace prszz::vcs {

// Content hash of a git object; 40 lowercase hex characters on the wire.
class ObjectId {
public:
    ObjectId() = default;

    static std::optional<ObjectId> parse(std::string_view hex);
    static ObjectId from_raw(const unsigned char* bytes20);

    std::string hex() const;
    const std::array<unsigned char, 20>& raw() const noexcept { return bytes_; }
    bool is_null() const noexcept;

    auto operator<=>(const ObjectId&) const = default;

private:
    std::array<unsigned char, 20> bytes_{};
};

using CommitId = ObjectId;

struct ObjectIdHash {
    std::size_t operator()(const ObjectId& id) const noexcept {
        std::size_t h = 0;
        for (std::size_t i = 0; i < sizeof(std::size_t) && i < 20; ++i)
            h = (h << 8) | id.raw()[i];
        return h;
    }
};

} // namespace prszz::vcs
