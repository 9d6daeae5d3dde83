#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace prszz::strings {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Splits on a single character; keeps empty fields.
std::vector<std::string_view> split(std::string_view s, char sep);

// Splits text into lines. A trailing newline does not produce an extra
// empty line; "a\nb" and "a\nb\n" both yield {"a", "b"}.
std::vector<std::string_view> split_lines(std::string_view text);

// First line of a message, trimmed, inner whitespace runs collapsed to one
// space. The normalization used wherever commit subjects are compared.
std::string normalized_first_line(std::string_view message);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool iequals(std::string_view a, std::string_view b);

} // namespace prszz::strings
