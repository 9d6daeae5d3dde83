#pragma once

#include "prszz/eval/metrics.hpp"
#include "prszz/fix/matcher.hpp"
#include "prszz/pipeline/config.hpp"
#include "prszz/trace/tracer.hpp"

#include <memory>

namespace prszz::pipeline {

// Everything the match/trace stages share, prepared once: repository,
// snapshot, selected + merged bugs, reconstructed PR maps, link graph.
struct PipelineData {
    std::unique_ptr<vcs::Repository> repo;
    std::unique_ptr<forge::Snapshot> snapshot;
    std::vector<forge::BugCarrier> carriers; // borrow from *snapshot
    std::vector<links::DistinctBug> bugs;
    std::map<std::string, pr::InnerCommitMap> inner_maps;
    links::LinkGraph graph;
    lang::ProfileRegistry profiles = lang::ProfileRegistry::builtin();
    std::unique_ptr<trace::BlameCache> blame_cache =
        std::make_unique<trace::BlameCache>();
};

PipelineData prepare(const ProjectConfig& config);

std::vector<fix::FixRecord> run_match(PipelineData& data,
                                      const ProjectConfig& config);
std::vector<fix::FixRecord> run_match_bszz(PipelineData& data,
                                           const ProjectConfig& config);

std::vector<trace::TraceResult> run_trace(PipelineData& data,
                                          const ProjectConfig& config,
                                          const trace::VariantId& variant,
                                          const std::vector<fix::FixRecord>& fixes);

// Stage artifacts (stage isolation: trace consumes match output from disk).
nlohmann::json fix_records_to_json(const std::vector<fix::FixRecord>& records);
std::vector<fix::FixRecord> fix_records_from_json(const nlohmann::json& value);
nlohmann::json trace_results_to_json(const std::vector<trace::TraceResult>& results);
std::vector<trace::TraceResult> trace_results_from_json(const nlohmann::json& value);

} // namespace prszz::pipeline
