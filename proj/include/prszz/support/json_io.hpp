#pragma once

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <string>

namespace prszz::json_io {

nlohmann::json read_file(const std::filesystem::path& path);

// Canonical form used for every artifact this project writes: two-space
// indent, sorted object keys (nlohmann's ordered std::map), LF line endings,
// UTF-8, single trailing newline. save/load round-trips byte-identically.
std::string canonical(const nlohmann::json& value);
void write_file(const std::filesystem::path& path, const nlohmann::json& value);

} // namespace prszz::json_io
