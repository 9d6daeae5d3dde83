#pragma once

#include <array>
#include <string>
#include <string_view>

namespace prszz::hashing {

std::array<unsigned char, 20> sha1(std::string_view data);
std::string sha1_hex(std::string_view data);

std::string to_hex(const unsigned char* data, std::size_t len);

} // namespace prszz::hashing
