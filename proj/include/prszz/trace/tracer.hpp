#pragma once

#include "prszz/filter/filters.hpp"
#include "prszz/fix/matcher.hpp"
#include "prszz/lang/profile.hpp"
#include "prszz/links/dedup.hpp"
#include "prszz/links/graph.hpp"
#include "prszz/pr/reconstruct.hpp"
#include "prszz/trace/variant.hpp"
#include "prszz/vcs/blame.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace prszz::trace {

enum class RejectionReason { MetaChange, AfterBugReport, AfterPrCreated, InsideFixPr };

std::string_view rejection_name(RejectionReason reason);

struct Contribution {
    std::string base_path; // at the f1 diff base
    int base_line = 0;
    std::string origin_path; // at the inducing commit
    int origin_line = 0;

    auto operator<=>(const Contribution&) const = default;
};

struct Suspect {
    vcs::ObjectId commit;
    std::vector<Contribution> contributions;
    bool secured = false;
    std::optional<RejectionReason> rejected_reason;

    bool rejected() const { return rejected_reason.has_value(); }
};

enum class GrainLevel { Commit, File, Method };

std::string_view grain_name(GrainLevel level);

struct FineGrainedEntry {
    GrainLevel level = GrainLevel::Commit;
    vcs::ObjectId inducing_commit;
    std::optional<std::string> path;                  // at the inducing commit
    std::optional<std::pair<int, int>> method_span;   // at the inducing commit
    std::optional<std::string> method_header;
    std::string fix_path; // fixing counterpart at the diff base
    std::optional<std::pair<int, int>> fix_span;
};

struct TraceResult {
    forge::IssueRef bug;
    vcs::ObjectId fix;
    vcs::ObjectId trace_base; // the diff base the suspects were traced from
    VariantId variant;
    std::vector<Suspect> suspects;
    std::optional<vcs::ObjectId> selected;
    std::vector<FineGrainedEntry> fine_grained;
    bool rejected_by_size = false;
    std::string note;
};

// Shared read-mostly blame cache keyed by (commit, path). Optionally
// persisted to disk; a stored cache is only reused while the repository
// head it was built against is unchanged.
class BlameCache {
public:
    std::shared_ptr<const std::vector<vcs::LineOrigin>>
    blame(const vcs::Repository& repo, const vcs::ObjectId& at,
          const std::string& path);

    // No-ops (returning false / keeping the cache empty) when the file is
    // absent or was built against a different head.
    bool load_file(const std::filesystem::path& path,
                   const vcs::ObjectId& repo_head);
    void save_file(const std::filesystem::path& path,
                   const vcs::ObjectId& repo_head) const;

private:
    mutable std::mutex mutex_;
    std::map<std::pair<vcs::ObjectId, std::string>,
             std::shared_ptr<const std::vector<vcs::LineOrigin>>>
        cache_;
};

struct TraceContext {
    TraceContext(const vcs::Repository& r, const forge::Snapshot& s)
        : repo(r), snapshot(s) {}

    const vcs::Repository& repo;
    const forge::Snapshot& snapshot;
    const links::LinkGraph* graph = nullptr;
    const std::map<std::string, pr::InnerCommitMap>* inner_maps = nullptr;
    const lang::ProfileRegistry* profiles = nullptr;
    filter::SizeThresholds thresholds;
    int wholefile_window = 25; // +-N lines when no enclosing method exists
    // s2 alternative behaviour: secured suspects suppress all other live
    // suspects instead of merely ranking first in PrSelect.
    bool secured_suppresses = false;
    BlameCache* blame_cache = nullptr;
    int jobs = 1;
};

struct RejectionRuleSet {
    bool temporal = true;
    bool pr_temporal = false; // s1: also reject commits after pr_fix creation
};

// Blames the filtered fix diff at its base. Removed lines are traced
// directly (minus cosmetic lines under the variant's filter); added-only
// hunks contribute the enclosing method span at the base when method_trace
// is on. Under meta_filter blamed meta commits are skipped to the next
// history commit; under cosmetic_filter cosmetic changes in history are
// blamed through.
// vcs errors are contained per file: the file is skipped and its path
// recorded in `skipped` when given.
std::vector<Suspect> trace_suspects(const TraceContext& ctx,
                                    const filter::FilteredFix& filtered,
                                    const VariantId& variant,
                                    std::vector<std::string>* skipped = nullptr);

std::vector<Suspect> reject_suspects(std::vector<Suspect> suspects,
                                     const links::DistinctBug& bug,
                                     const forge::PullRequest* fixing_pr,
                                     const pr::InnerCommitMap* fix_map,
                                     const RejectionRuleSet& rules,
                                     const vcs::Repository& repo);

// s2: a suspect whose owning PR is linked to the fixing PR is secured.
// Securing lifts an AfterBugReport rejection but never AfterPrCreated or
// InsideFixPr.
std::vector<Suspect> mark_secured(std::vector<Suspect> suspects,
                                  const forge::IssueRef& fixing_pr,
                                  const links::LinkGraph& graph,
                                  const std::map<std::string, pr::InnerCommitMap>&
                                      inner_maps);

// s3: commit-level entry always; file/method entries pair fix-side
// locations with the blamed origins. For squashed pr_sus only inner commits
// touching the blamed lines contribute.
std::vector<FineGrainedEntry>
refine_fine_grained(const TraceContext& ctx, const Suspect& suspect,
                    const pr::InnerCommitMap* sus_map,
                    const forge::PullRequest* sus_pull,
                    const filter::FilteredFix& filtered);

// Alternative s2 behaviour (TraceContext::secured_suppresses): when any
// secured live suspect exists, unsecured live suspects are dropped.
std::vector<Suspect> apply_secured_suppression(std::vector<Suspect> suspects);

std::optional<vcs::ObjectId> select_inducing(const std::vector<Suspect>& suspects,
                                             SelectionStrategy strategy,
                                             const TraceContext& ctx);

// End-to-end application of one variant's flag set to resolved fixes.
std::vector<TraceResult> run_variant(const TraceContext& ctx,
                                     const VariantId& variant,
                                     const std::vector<fix::FixRecord>& fixes,
                                     const std::vector<links::DistinctBug>& bugs);

} // namespace prszz::trace
