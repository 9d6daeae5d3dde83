#pragma once

#include "prszz/fix/matcher.hpp"
#include "prszz/trace/tracer.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <set>

namespace prszz::eval {

struct Metrics {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;

    // precision/recall use 0/0 = 0; F = 2PR/(P+R) when P+R > 0, else 0.
    void finalize();
};

struct GroundTruth {
    // null value: the bug was resolved without a fixing commit.
    std::map<forge::IssueRef, std::optional<vcs::ObjectId>> fixing;
    std::map<vcs::ObjectId, std::set<vcs::ObjectId>> inducing;

    static GroundTruth from_json(const nlohmann::json& value);
    nlohmann::json to_json() const;
    static GroundTruth load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

// Single-slot accounting: exact match -> TP; wrong commit -> FP (+FN when
// the truth is non-null); missed non-null truth -> FN; no prediction on a
// null-truth bug is ignored. Throws MissingTruth naming the bug.
Metrics eval_fixing(const std::vector<fix::FixRecord>& predictions,
                    const GroundTruth& truth);

// Set-based micro average over fixes; the predicted set is the non-rejected
// suspects (or the selected commit when use_selected). Throws MissingTruth
// naming the fix commit.
Metrics eval_inducing(const std::vector<trace::TraceResult>& results,
                      const GroundTruth& truth, bool use_selected);

// Coverage statistic: share of bugs with a mapped fixing commit.
double fixing_coverage(const std::vector<fix::FixRecord>& predictions);

nlohmann::json metrics_to_json(const Metrics& metrics);

} // namespace prszz::eval
