#pragma once

#include <string>
#include <string_view>

namespace prszz::zstream {

// Inflates a complete zlib stream. Throws CorruptObjectDatabase on damage.
std::string inflate(std::string_view compressed);

// Inflates a zlib stream embedded at the start of `data`, ignoring trailing
// bytes (pack entries are concatenated streams). Returns the inflated bytes;
// `consumed` receives the compressed length when non-null.
std::string inflate_prefix(std::string_view data, std::size_t* consumed = nullptr);

std::string deflate(std::string_view raw);

} // namespace prszz::zstream
