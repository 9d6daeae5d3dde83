#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace prszz::timeparse {

// ISO-8601 timestamps as used by the GitHub ("2021-01-30T12:34:56Z") and
// Jira ("2020-01-08T10:23:45.000+0000") REST APIs -> UTC epoch seconds.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

std::string to_iso8601(std::int64_t epoch_seconds);

} // namespace prszz::timeparse
