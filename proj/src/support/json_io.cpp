#include "prszz/support/json_io.hpp"

#include "prszz/support/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace prszz::json_io {

nlohmann::json read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaViolation(path.string() + ": " + e.what());
    }
}

std::string canonical(const nlohmann::json& value) {
    return value.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const nlohmann::json& value) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << canonical(value);
    if (!out)
        throw IoError("short write to " + path.string());
}

} // namespace prszz::json_io
