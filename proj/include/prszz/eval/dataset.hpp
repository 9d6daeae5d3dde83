#pragma once

#include "prszz/trace/tracer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace prszz::eval {

// CSV rows at one granularity. Selection variants contribute only the
// selected commit; plain variants contribute every non-rejected suspect.
// Deterministic: sorted by (bug, inducing_commit, path), UTF-8, LF.
void write_dataset(const std::vector<trace::TraceResult>& results,
                   trace::GrainLevel level, const std::filesystem::path& out);

std::string render_dataset(const std::vector<trace::TraceResult>& results,
                           trace::GrainLevel level);

} // namespace prszz::eval
