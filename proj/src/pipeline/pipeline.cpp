#include "prszz/pipeline/pipeline.hpp"

#include "prszz/forge/snapshot_store.hpp"
#include "prszz/support/errors.hpp"
#include "prszz/support/parallel.hpp"

#include <algorithm>

namespace prszz::pipeline {

using nlohmann::json;

PipelineData prepare(const ProjectConfig& config) {
    PipelineData data;
    data.repo = std::make_unique<vcs::Repository>(
        vcs::Repository::open(config.repo_path));
    data.snapshot = std::make_unique<forge::Snapshot>(
        forge::load_snapshot(config.snapshot_dir));

    forge::BugPolicy policy;
    if (!config.bug_labels.empty())
        policy.bug_labels = config.bug_labels;
    data.carriers = forge::select_bug_tickets(*data.snapshot, policy);

    for (const auto& pull : data.snapshot->pulls) {
        if (!pull.merged)
            continue;
        if (auto map = pr::reconstruct(pull, *data.repo))
            data.inner_maps.emplace(pull.ref.key, std::move(*map));
    }

    links::GraphOptions options;
    options.project_keys = config.project_keys();
    options.patterns = config.patterns;
    std::vector<pr::InnerCommitMap> maps;
    maps.reserve(data.inner_maps.size());
    for (const auto& [key, map] : data.inner_maps)
        maps.push_back(map);
    data.graph = links::add_transitive_edges(
        links::build_graph(*data.snapshot, data.repo.get(), maps, options));

    data.bugs = links::merge_duplicate_bugs(data.carriers, data.graph);

    if (!config.language_profiles.empty())
        data.profiles.merge_config(config.language_profiles);
    return data;
}

std::vector<fix::FixRecord> run_match(PipelineData& data,
                                      const ProjectConfig& config) {
    fix::MatcherOptions options;
    options.project_keys = config.project_keys();
    options.patterns = config.patterns;
    options.jobs = config.jobs > 0 ? config.jobs : parallel::default_jobs();
    return fix::match_all_fixes(data.bugs, *data.snapshot, *data.repo, data.graph,
                                data.inner_maps, options);
}

std::vector<fix::FixRecord> run_match_bszz(PipelineData& data,
                                           const ProjectConfig& config) {
    fix::MatcherOptions options;
    options.project_keys = config.project_keys();
    options.patterns = config.patterns;
    options.jobs = config.jobs > 0 ? config.jobs : parallel::default_jobs();

    if (config.merged_aliases_for_baselines)
        return fix::match_all_fixes_bszz(data.bugs, *data.repo, options);

    // Baseline without merged identifiers: every carrier is its own bug.
    std::vector<links::DistinctBug> singletons;
    for (const auto& bug : data.bugs) {
        for (const auto& member : bug.members) {
            links::DistinctBug single;
            single.canonical = member.ref;
            single.aliases = {member.ref};
            single.members = {member};
            single.merged_ticket = bug.merged_ticket;
            singletons.push_back(std::move(single));
        }
    }
    return fix::match_all_fixes_bszz(singletons, *data.repo, options);
}

std::vector<trace::TraceResult> run_trace(PipelineData& data,
                                          const ProjectConfig& config,
                                          const trace::VariantId& variant,
                                          const std::vector<fix::FixRecord>& fixes) {
    trace::TraceContext ctx{*data.repo, *data.snapshot};
    ctx.graph = &data.graph;
    ctx.inner_maps = &data.inner_maps;
    ctx.profiles = &data.profiles;
    ctx.thresholds = config.thresholds;
    ctx.wholefile_window = config.wholefile_window;
    ctx.secured_suppresses = config.secured_suppresses;
    ctx.blame_cache = data.blame_cache.get();
    ctx.jobs = config.jobs > 0 ? config.jobs : parallel::default_jobs();
    return trace::run_variant(ctx, variant, fixes, data.bugs);
}

json fix_records_to_json(const std::vector<fix::FixRecord>& records) {
    json out = json::array();
    for (const auto& record : records) {
        json row;
        row["bug"] = record.bug.to_string();
        row["via"] = std::string(fix::route_name(record.via));
        if (record.fixing_commit)
            row["fixing_commit"] = record.fixing_commit->hex();
        else
            row["fixing_commit"] = nullptr;
        if (record.fixing_pr)
            row["fixing_pr"] = record.fixing_pr->key;
        if (record.score) {
            row["score"] = {{"value", record.score->value},
                            {"reasons", record.score->reasons}};
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<fix::FixRecord> fix_records_from_json(const json& value) {
    std::vector<fix::FixRecord> records;
    for (const auto& row : value) {
        fix::FixRecord record;
        auto bug = row.at("bug").get<std::string>();
        auto colon = bug.find(':');
        if (colon == std::string::npos)
            throw SchemaViolation("malformed bug ref '" + bug + "'");
        record.bug.system = forge::parse_system(bug.substr(0, colon));
        record.bug.key = bug.substr(colon + 1);

        auto via = row.value("via", "none");
        record.via = via == "pr_link"         ? fix::MatchRoute::PrLink
                     : via == "message_match" ? fix::MatchRoute::MessageMatch
                                              : fix::MatchRoute::None;
        if (auto it = row.find("fixing_commit"); it != row.end() && !it->is_null())
            record.fixing_commit = vcs::ObjectId::parse(it->get<std::string>());
        if (auto it = row.find("fixing_pr"); it != row.end() && !it->is_null())
            record.fixing_pr =
                forge::IssueRef{forge::System::PullRequest, it->get<std::string>()};
        if (auto it = row.find("score"); it != row.end()) {
            fix::ConfidenceScore score;
            score.value = it->value("value", 0);
            for (const auto& reason : it->value("reasons", json::array()))
                score.reasons.push_back(reason.get<std::string>());
            record.score = std::move(score);
        }
        records.push_back(std::move(record));
    }
    return records;
}

json trace_results_to_json(const std::vector<trace::TraceResult>& results) {
    json out = json::array();
    for (const auto& result : results) {
        json row;
        row["bug"] = result.bug.to_string();
        row["fix"] = result.fix.hex();
        if (!result.trace_base.is_null())
            row["trace_base"] = result.trace_base.hex();
        row["variant"] = result.variant.to_string();
        json suspects = json::array();
        for (const auto& suspect : result.suspects) {
            json s;
            s["commit"] = suspect.commit.hex();
            s["secured"] = suspect.secured;
            if (suspect.rejected_reason)
                s["rejected"] =
                    std::string(trace::rejection_name(*suspect.rejected_reason));
            json contributions = json::array();
            for (const auto& c : suspect.contributions)
                contributions.push_back({{"base_path", c.base_path},
                                         {"base_line", c.base_line},
                                         {"origin_path", c.origin_path},
                                         {"origin_line", c.origin_line}});
            s["contributions"] = std::move(contributions);
            suspects.push_back(std::move(s));
        }
        row["suspects"] = std::move(suspects);
        if (result.selected)
            row["selected"] = result.selected->hex();
        json fine = json::array();
        for (const auto& entry : result.fine_grained) {
            json e;
            e["level"] = std::string(trace::grain_name(entry.level));
            e["inducing_commit"] = entry.inducing_commit.hex();
            if (entry.path)
                e["path"] = *entry.path;
            if (entry.method_span)
                e["method_span"] = {entry.method_span->first,
                                    entry.method_span->second};
            if (entry.method_header)
                e["method_header"] = *entry.method_header;
            e["fix_path"] = entry.fix_path;
            if (entry.fix_span)
                e["fix_span"] = {entry.fix_span->first, entry.fix_span->second};
            fine.push_back(std::move(e));
        }
        row["fine_grained"] = std::move(fine);
        if (result.rejected_by_size)
            row["rejected_by_size"] = true;
        if (!result.note.empty())
            row["note"] = result.note;
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

vcs::ObjectId require_commit(const json& value, const char* what) {
    auto id = vcs::ObjectId::parse(value.get<std::string>());
    if (!id)
        throw SchemaViolation(std::string("malformed commit id in ") + what);
    return *id;
}

} // namespace

std::vector<trace::TraceResult> trace_results_from_json(const json& value) {
    std::vector<trace::TraceResult> results;
    for (const auto& row : value) {
        trace::TraceResult result;
        auto bug = row.at("bug").get<std::string>();
        auto colon = bug.find(':');
        if (colon == std::string::npos)
            throw SchemaViolation("malformed bug ref '" + bug + "'");
        result.bug.system = forge::parse_system(bug.substr(0, colon));
        result.bug.key = bug.substr(colon + 1);
        result.fix = require_commit(row.at("fix"), "trace results");
        if (auto it = row.find("trace_base"); it != row.end())
            result.trace_base = require_commit(*it, "trace results");
        if (auto variant = trace::VariantId::parse(row.value("variant", "B")))
            result.variant = *variant;

        for (const auto& s : row.value("suspects", json::array())) {
            trace::Suspect suspect;
            suspect.commit = require_commit(s.at("commit"), "suspects");
            suspect.secured = s.value("secured", false);
            if (auto it = s.find("rejected"); it != s.end() && !it->is_null()) {
                auto name = it->get<std::string>();
                if (name == "meta_change")
                    suspect.rejected_reason = trace::RejectionReason::MetaChange;
                else if (name == "after_bug_report")
                    suspect.rejected_reason =
                        trace::RejectionReason::AfterBugReport;
                else if (name == "after_pr_created")
                    suspect.rejected_reason =
                        trace::RejectionReason::AfterPrCreated;
                else if (name == "inside_fix_pr")
                    suspect.rejected_reason = trace::RejectionReason::InsideFixPr;
            }
            for (const auto& c : s.value("contributions", json::array())) {
                trace::Contribution contribution;
                contribution.base_path = c.value("base_path", "");
                contribution.base_line = c.value("base_line", 0);
                contribution.origin_path = c.value("origin_path", "");
                contribution.origin_line = c.value("origin_line", 0);
                suspect.contributions.push_back(std::move(contribution));
            }
            result.suspects.push_back(std::move(suspect));
        }
        if (auto it = row.find("selected"); it != row.end() && !it->is_null())
            result.selected = require_commit(*it, "selection");
        for (const auto& e : row.value("fine_grained", json::array())) {
            trace::FineGrainedEntry entry;
            auto level = e.value("level", "commit");
            entry.level = level == "file"     ? trace::GrainLevel::File
                          : level == "method" ? trace::GrainLevel::Method
                                              : trace::GrainLevel::Commit;
            entry.inducing_commit =
                require_commit(e.at("inducing_commit"), "fine_grained");
            if (auto it = e.find("path"); it != e.end())
                entry.path = it->get<std::string>();
            if (auto it = e.find("method_span"); it != e.end())
                entry.method_span = {it->at(0).get<int>(), it->at(1).get<int>()};
            if (auto it = e.find("method_header"); it != e.end())
                entry.method_header = it->get<std::string>();
            entry.fix_path = e.value("fix_path", "");
            if (auto it = e.find("fix_span"); it != e.end())
                entry.fix_span = {it->at(0).get<int>(), it->at(1).get<int>()};
            result.fine_grained.push_back(std::move(entry));
        }
        result.rejected_by_size = row.value("rejected_by_size", false);
        result.note = row.value("note", "");
        results.push_back(std::move(result));
    }
    return results;
}

} // namespace prszz::pipeline
