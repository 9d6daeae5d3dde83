#include "prszz/trace/tracer.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/json_io.hpp"
#include "prszz/support/parallel.hpp"
#include "prszz/support/strings.hpp"
#include "prszz/vcs/diff.hpp"

#include <algorithm>
#include <unordered_map>

namespace prszz::trace {

using filter::FilteredFix;
using links::DistinctBug;
using vcs::FileDiff;
using vcs::Hunk;
using vcs::ObjectId;
using vcs::Repository;

std::string_view rejection_name(RejectionReason reason) {
    switch (reason) {
    case RejectionReason::MetaChange: return "meta_change";
    case RejectionReason::AfterBugReport: return "after_bug_report";
    case RejectionReason::AfterPrCreated: return "after_pr_created";
    case RejectionReason::InsideFixPr: return "inside_fix_pr";
    }
    return "unknown";
}

std::string_view grain_name(GrainLevel level) {
    switch (level) {
    case GrainLevel::Commit: return "commit";
    case GrainLevel::File: return "file";
    case GrainLevel::Method: return "method";
    }
    return "commit";
}

std::shared_ptr<const std::vector<vcs::LineOrigin>>
BlameCache::blame(const Repository& repo, const ObjectId& at,
                  const std::string& path) {
    auto key = std::make_pair(at, path);
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
    }
    auto result = std::make_shared<const std::vector<vcs::LineOrigin>>(
        vcs::blame_file(repo, at, path));
    std::lock_guard lock(mutex_);
    cache_.emplace(std::move(key), result);
    return result;
}

bool BlameCache::load_file(const std::filesystem::path& path,
                           const ObjectId& repo_head) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        return false;
    nlohmann::json stored;
    try {
        stored = json_io::read_file(path);
    } catch (const Error&) {
        return false;
    }
    if (stored.value("head", "") != repo_head.hex())
        return false; // repository moved on: cache invalidated

    std::lock_guard lock(mutex_);
    for (const auto& entry : stored.value("entries", nlohmann::json::array())) {
        auto at = ObjectId::parse(entry.value("commit", ""));
        if (!at)
            continue;
        std::string file = entry.value("path", "");
        std::vector<vcs::LineOrigin> origins;
        int line = 0;
        for (const auto& row : entry.value("lines", nlohmann::json::array())) {
            vcs::LineOrigin origin;
            origin.path = file;
            origin.line = ++line;
            auto commit = ObjectId::parse(row.value("c", ""));
            if (!commit)
                break;
            origin.origin_commit = *commit;
            origin.origin_line = row.value("l", 0);
            origin.origin_path = row.value("p", file);
            origins.push_back(std::move(origin));
        }
        cache_[{*at, file}] =
            std::make_shared<const std::vector<vcs::LineOrigin>>(
                std::move(origins));
    }
    return true;
}

void BlameCache::save_file(const std::filesystem::path& path,
                           const ObjectId& repo_head) const {
    nlohmann::json entries = nlohmann::json::array();
    {
        std::lock_guard lock(mutex_);
        for (const auto& [key, origins] : cache_) {
            nlohmann::json lines = nlohmann::json::array();
            for (const auto& origin : *origins)
                lines.push_back({{"c", origin.origin_commit.hex()},
                                 {"l", origin.origin_line},
                                 {"p", origin.origin_path}});
            entries.push_back({{"commit", key.first.hex()},
                               {"path", key.second},
                               {"lines", std::move(lines)}});
        }
    }
    json_io::write_file(path, nlohmann::json{{"head", repo_head.hex()},
                                             {"entries", std::move(entries)}});
}

namespace {

struct OriginPos {
    ObjectId commit;
    std::string path;
    int line = 0;
};

std::string line_text_at(const Repository& repo, const ObjectId& commit,
                         const std::string& path, int line) {
    auto content = repo.file_at(commit, path);
    auto lines = strings::split_lines(content);
    if (line < 1 || line > static_cast<int>(lines.size()))
        return {};
    return std::string(lines[static_cast<std::size_t>(line - 1)]);
}

// The predecessor position of a line changed at `at`: location of the
// positional counterpart (or unchanged mapping) in the first parent.
struct StepResult {
    OriginPos pos;
    bool replaced_pair = false;  // line was in an added region with a
                                 // positionally paired removed line
    std::string removed_text;
};

std::optional<StepResult> step_to_parent(const Repository& repo,
                                         const OriginPos& at) {
    auto commit = repo.commit(at.commit);
    if (commit->parents.empty())
        return std::nullopt;
    const ObjectId parent = commit->parents.front();

    std::string parent_path = at.path;
    auto parent_entry = repo.entry_at(parent, parent_path);
    if (!parent_entry) {
        for (const auto& diff : vcs::diff_commits(repo, parent, at.commit)) {
            if (diff.change_kind == vcs::ChangeKind::Renamed &&
                diff.new_path == at.path) {
                parent_path = *diff.old_path;
                parent_entry = repo.entry_at(parent, parent_path);
                break;
            }
        }
        if (!parent_entry)
            return std::nullopt; // born here
    }

    auto cur_entry = repo.entry_at(at.commit, at.path);
    if (!cur_entry)
        return std::nullopt;
    if (parent_entry->id == cur_entry->id) {
        StepResult step;
        step.pos = {parent, parent_path, at.line};
        return step;
    }

    auto hunks = vcs::diff_lines(repo.blob(parent_entry->id),
                                 repo.blob(cur_entry->id));
    int offset = 0;
    for (const auto& hunk : hunks) {
        if (!hunk.added.empty() && at.line >= hunk.added.front().first &&
            at.line <= hunk.added.back().first) {
            std::size_t idx =
                static_cast<std::size_t>(at.line - hunk.added.front().first);
            if (idx >= hunk.removed.size())
                return std::nullopt; // pure addition, no counterpart
            StepResult step;
            step.pos = {parent, parent_path, hunk.removed[idx].first};
            step.replaced_pair = true;
            step.removed_text = hunk.removed[idx].second;
            return step;
        }
        if (!hunk.added.empty()) {
            if (hunk.added.back().first < at.line)
                offset += static_cast<int>(hunk.added.size()) -
                          static_cast<int>(hunk.removed.size());
        } else if (hunk.new_start < at.line) {
            offset -= static_cast<int>(hunk.removed.size());
        }
    }
    StepResult step;
    step.pos = {parent, parent_path, at.line - offset};
    return step;
}

class OriginResolver {
public:
    OriginResolver(const TraceContext& ctx, const VariantId& variant)
        : ctx_(ctx), variant_(variant) {}

    // Walks past meta commits (MA) and cosmetic history changes (AG) to the
    // commit that materially introduced the line. nullopt: drop entirely
    // (untraceable past a meta commit). `dropped_meta` reports the meta
    // commit that absorbed the line in that case.
    std::optional<OriginPos> resolve(OriginPos origin,
                                     std::optional<ObjectId>& dropped_meta) {
        for (int depth = 0; depth < 1024; ++depth) {
            if (variant_.meta_filter && is_meta(origin.commit)) {
                auto step = step_to_parent(ctx_.repo, origin);
                if (!step) {
                    dropped_meta = origin.commit;
                    return std::nullopt;
                }
                origin = reblame(step->pos);
                continue;
            }
            if (variant_.cosmetic_filter) {
                auto step = step_to_parent(ctx_.repo, origin);
                if (step && step->replaced_pair) {
                    const lang::LanguageProfile* profile = profile_for(origin.path);
                    if (profile != nullptr) {
                        std::string current = line_text_at(
                            ctx_.repo, origin.commit, origin.path, origin.line);
                        if (lang::normalize_line(step->removed_text, *profile) ==
                            lang::normalize_line(current, *profile)) {
                            origin = reblame(step->pos);
                            continue;
                        }
                    }
                }
            }
            break;
        }
        return origin;
    }

    bool is_meta(const ObjectId& id) {
        auto it = meta_cache_.find(id);
        if (it != meta_cache_.end())
            return it->second;
        bool meta = vcs::is_meta_change(ctx_.repo, id);
        meta_cache_.emplace(id, meta);
        return meta;
    }

    const lang::LanguageProfile* profile_for(const std::string& path) const {
        return ctx_.profiles ? ctx_.profiles->for_path(path) : nullptr;
    }

private:
    OriginPos reblame(const OriginPos& pos) {
        if (ctx_.blame_cache != nullptr) {
            auto blamed = ctx_.blame_cache->blame(ctx_.repo, pos.commit, pos.path);
            const auto& origin = (*blamed)[static_cast<std::size_t>(pos.line - 1)];
            return {origin.origin_commit, origin.origin_path, origin.origin_line};
        }
        auto blamed = vcs::blame_file(ctx_.repo, pos.commit, pos.path);
        const auto& origin = blamed[static_cast<std::size_t>(pos.line - 1)];
        return {origin.origin_commit, origin.origin_path, origin.origin_line};
    }

    const TraceContext& ctx_;
    const VariantId& variant_;
    std::unordered_map<ObjectId, bool, vcs::ObjectIdHash> meta_cache_;
};

} // namespace

std::vector<Suspect> trace_suspects(const TraceContext& ctx,
                                    const FilteredFix& filtered,
                                    const VariantId& variant,
                                    std::vector<std::string>* skipped) {
    OriginResolver resolver(ctx, variant);
    std::map<ObjectId, Suspect> by_commit;

    auto record = [&](const ObjectId& commit, Contribution contribution) {
        Suspect& suspect = by_commit[commit];
        suspect.commit = commit;
        suspect.contributions.push_back(std::move(contribution));
    };
    auto record_rejected_meta = [&](const ObjectId& commit,
                                    Contribution contribution) {
        Suspect& suspect = by_commit[commit];
        suspect.commit = commit;
        suspect.rejected_reason = RejectionReason::MetaChange;
        suspect.contributions.push_back(std::move(contribution));
    };

    for (const auto& diff : filtered.files) {
        if (!diff.old_path)
            continue; // file added by the fix: nothing exists at the base
        if (diff.change_kind == vcs::ChangeKind::MetaOnly)
            continue;
        const std::string& base_path = *diff.old_path;
        try {
        const lang::LanguageProfile* profile =
            resolver.profile_for(diff.new_path.value_or(base_path));

        std::set<int> lines_to_blame;
        std::optional<int> base_line_count;
        auto ensure_line_count = [&]() {
            if (!base_line_count) {
                auto content = ctx.repo.file_at(filtered.base, base_path);
                base_line_count =
                    static_cast<int>(strings::split_lines(content).size());
            }
            return *base_line_count;
        };

        for (const auto& hunk : diff.hunks) {
            for (std::size_t i = 0; i < hunk.removed.size(); ++i) {
                const auto& [line, text] = hunk.removed[i];
                if (variant.cosmetic_filter) {
                    std::optional<std::string> new_text;
                    if (i < hunk.added.size())
                        new_text = hunk.added[i].second;
                    if (lang::is_cosmetic_line(text, new_text, profile))
                        continue;
                }
                lines_to_blame.insert(line);
            }

            if (hunk.removed.empty() && !hunk.added.empty() &&
                variant.method_trace) {
                // Solely added lines cannot be traced; the enclosing method
                // at the base stands in for them.
                int count = ensure_line_count();
                if (count == 0)
                    continue;
                int anchor = std::clamp(hunk.old_start, 1, count);
                int span_start = 0, span_end = 0;
                auto content = ctx.repo.file_at(filtered.base, base_path);
                std::optional<lang::MethodSpan> span;
                if (profile != nullptr)
                    span = lang::enclosing_method_span(content, anchor, *profile);
                if (span) {
                    span_start = span->start_line;
                    span_end = span->end_line;
                } else {
                    span_start = std::max(1, anchor - ctx.wholefile_window);
                    span_end = std::min(count, anchor + ctx.wholefile_window);
                }
                auto lines = strings::split_lines(content);
                for (int line = span_start; line <= span_end; ++line) {
                    if (variant.cosmetic_filter &&
                        lang::is_cosmetic_line(
                            std::string(lines[static_cast<std::size_t>(line - 1)]),
                            std::nullopt, profile))
                        continue;
                    lines_to_blame.insert(line);
                }
            }
        }
        if (lines_to_blame.empty())
            continue;

        std::shared_ptr<const std::vector<vcs::LineOrigin>> blamed;
        std::vector<vcs::LineOrigin> local;
        if (ctx.blame_cache != nullptr) {
            blamed = ctx.blame_cache->blame(ctx.repo, filtered.base, base_path);
        } else {
            local = vcs::blame_file(ctx.repo, filtered.base, base_path);
        }
        const auto& origins = blamed ? *blamed : local;

        for (int line : lines_to_blame) {
            if (line < 1 || line > static_cast<int>(origins.size()))
                continue;
            const auto& raw = origins[static_cast<std::size_t>(line - 1)];
            OriginPos pos{raw.origin_commit, raw.origin_path, raw.origin_line};
            std::optional<ObjectId> dropped_meta;
            auto final_pos = resolver.resolve(pos, dropped_meta);
            if (!final_pos) {
                if (dropped_meta)
                    record_rejected_meta(*dropped_meta,
                                         {base_path, line, raw.origin_path,
                                          raw.origin_line});
                continue;
            }
            record(final_pos->commit,
                   {base_path, line, final_pos->path, final_pos->line});
        }
        } catch (const Error& e) {
            if (skipped != nullptr)
                skipped->push_back(base_path + ": " + e.what());
        }
    }

    std::vector<Suspect> suspects;
    suspects.reserve(by_commit.size());
    for (auto& [commit, suspect] : by_commit) {
        std::sort(suspect.contributions.begin(), suspect.contributions.end());
        suspect.contributions.erase(std::unique(suspect.contributions.begin(),
                                                suspect.contributions.end()),
                                    suspect.contributions.end());
        suspects.push_back(std::move(suspect));
    }
    std::sort(suspects.begin(), suspects.end(),
              [&](const Suspect& a, const Suspect& b) {
                  auto ta = ctx.repo.commit(a.commit)->commit_time();
                  auto tb = ctx.repo.commit(b.commit)->commit_time();
                  if (ta != tb)
                      return ta < tb;
                  return a.commit < b.commit;
              });
    return suspects;
}

std::vector<Suspect> reject_suspects(std::vector<Suspect> suspects,
                                     const DistinctBug& bug,
                                     const forge::PullRequest* fixing_pr,
                                     const pr::InnerCommitMap* fix_map,
                                     const RejectionRuleSet& rules,
                                     const Repository& repo) {
    for (auto& suspect : suspects) {
        if (suspect.rejected_reason)
            continue; // MetaChange from tracing stays
        if (fix_map != nullptr && fix_map->contains(suspect.commit)) {
            suspect.rejected_reason = RejectionReason::InsideFixPr;
            continue;
        }
        auto commit_time = repo.commit(suspect.commit)->commit_time();
        if (rules.temporal && commit_time > bug.merged_ticket.created_at) {
            suspect.rejected_reason = RejectionReason::AfterBugReport;
            continue;
        }
        if (rules.pr_temporal && fixing_pr != nullptr &&
            commit_time > fixing_pr->created_at)
            suspect.rejected_reason = RejectionReason::AfterPrCreated;
    }
    return suspects;
}

std::vector<Suspect>
mark_secured(std::vector<Suspect> suspects, const forge::IssueRef& fixing_pr,
             const links::LinkGraph& graph,
             const std::map<std::string, pr::InnerCommitMap>& inner_maps) {
    links::NodeKey fix_node = links::NodeKey::issue(fixing_pr);

    for (auto& suspect : suspects) {
        bool linked = false;
        for (const auto& [key, map] : inner_maps) {
            if (map.pr == fixing_pr || !map.contains(suspect.commit))
                continue;
            if (graph.linked_either_direction(links::NodeKey::issue(map.pr),
                                              fix_node)) {
                linked = true;
                break;
            }
        }
        if (!linked) {
            suspect.secured = false;
            continue;
        }
        // Securing lifts AfterBugReport only: the PR link is the stronger
        // evidence. Structural rejections stand, and the invariant
        // secured => not rejected is preserved.
        if (!suspect.rejected_reason) {
            suspect.secured = true;
        } else if (*suspect.rejected_reason == RejectionReason::AfterBugReport) {
            suspect.rejected_reason.reset();
            suspect.secured = true;
        } else {
            suspect.secured = false;
        }
    }
    return suspects;
}

std::vector<FineGrainedEntry>
refine_fine_grained(const TraceContext& ctx, const Suspect& suspect,
                    const pr::InnerCommitMap* sus_map,
                    const forge::PullRequest* sus_pull,
                    const FilteredFix& filtered) {
    std::vector<FineGrainedEntry> entries;

    FineGrainedEntry commit_entry;
    commit_entry.level = GrainLevel::Commit;
    commit_entry.inducing_commit = suspect.commit;
    entries.push_back(commit_entry);

    // Squashed pr_sus: only inner commits touching the blamed lines
    // contribute to the fine-grained levels.
    auto contribution_allowed = [&](const Contribution& contribution) {
        if (sus_map == nullptr || sus_pull == nullptr ||
            sus_map->strategy != pr::MergeStrategy::Squash)
            return true;
        bool any_files = false;
        for (const auto& inner : sus_pull->inner_commits) {
            if (!inner.files)
                continue;
            any_files = true;
            for (const auto& file : *inner.files) {
                if (file.path != contribution.origin_path)
                    continue;
                if (file.added_ranges.empty())
                    return true; // file-level match without line data
                for (auto [start, count] : file.added_ranges)
                    if (contribution.origin_line >= start &&
                        contribution.origin_line < start + count)
                        return true;
            }
        }
        return !any_files; // no forge data: restriction not applicable
    };

    std::set<std::pair<std::string, std::string>> file_seen;
    std::set<std::tuple<std::string, int, int>> method_seen;

    for (const auto& contribution : suspect.contributions) {
        if (!contribution_allowed(contribution))
            continue;

        if (file_seen
                .emplace(contribution.origin_path, contribution.base_path)
                .second) {
            FineGrainedEntry entry;
            entry.level = GrainLevel::File;
            entry.inducing_commit = suspect.commit;
            entry.path = contribution.origin_path;
            entry.fix_path = contribution.base_path;
            entries.push_back(std::move(entry));
        }

        const lang::LanguageProfile* profile =
            ctx.profiles ? ctx.profiles->for_path(contribution.origin_path)
                         : nullptr;
        if (profile == nullptr)
            continue;
        auto origin_content =
            ctx.repo.file_at(suspect.commit, contribution.origin_path);
        auto origin_span = lang::enclosing_method_span(
            origin_content, contribution.origin_line, *profile);
        if (!origin_span)
            continue; // inducing line outside any method: file level only

        if (!method_seen
                 .emplace(contribution.origin_path, origin_span->start_line,
                          origin_span->end_line)
                 .second)
            continue;

        FineGrainedEntry entry;
        entry.level = GrainLevel::Method;
        entry.inducing_commit = suspect.commit;
        entry.path = contribution.origin_path;
        entry.method_span = {origin_span->start_line, origin_span->end_line};
        entry.method_header = origin_span->header;
        entry.fix_path = contribution.base_path;

        const lang::LanguageProfile* fix_profile =
            ctx.profiles ? ctx.profiles->for_path(contribution.base_path)
                         : nullptr;
        if (fix_profile != nullptr) {
            auto base_content =
                ctx.repo.file_at(filtered.base, contribution.base_path);
            if (auto fix_span = lang::enclosing_method_span(
                    base_content, contribution.base_line, *fix_profile))
                entry.fix_span = {fix_span->start_line, fix_span->end_line};
        }
        entries.push_back(std::move(entry));
    }

    return entries;
}

std::vector<Suspect> apply_secured_suppression(std::vector<Suspect> suspects) {
    bool any_secured = std::any_of(suspects.begin(), suspects.end(),
                                   [](const Suspect& s) { return s.secured; });
    if (any_secured)
        std::erase_if(suspects, [](const Suspect& s) {
            return !s.secured && !s.rejected();
        });
    return suspects;
}

std::optional<ObjectId> select_inducing(const std::vector<Suspect>& suspects,
                                        SelectionStrategy strategy,
                                        const TraceContext& ctx) {
    std::vector<const Suspect*> live;
    for (const auto& suspect : suspects)
        if (!suspect.rejected())
            live.push_back(&suspect);
    if (live.empty())
        return std::nullopt;

    auto newest = [&](const std::vector<const Suspect*>& pool) {
        const Suspect* best = pool.front();
        for (const auto* suspect : pool) {
            auto t = ctx.repo.commit(suspect->commit)->commit_time();
            auto bt = ctx.repo.commit(best->commit)->commit_time();
            if (t > bt || (t == bt && suspect->commit < best->commit))
                best = suspect;
        }
        return best->commit;
    };

    switch (strategy) {
    case SelectionStrategy::Recent:
        return newest(live);
    case SelectionStrategy::Largest: {
        auto size_of = [&](const ObjectId& id) {
            std::size_t size = 0;
            auto diffs = vcs::diff_with_first_parent(ctx.repo, id);
            size += diffs.size();
            for (const auto& diff : diffs)
                size += diff.changed_lines();
            return size;
        };
        const Suspect* best = live.front();
        std::size_t best_size = size_of(best->commit);
        for (const auto* suspect : live) {
            std::size_t size = size_of(suspect->commit);
            auto t = ctx.repo.commit(suspect->commit)->commit_time();
            auto bt = ctx.repo.commit(best->commit)->commit_time();
            if (size > best_size ||
                (size == best_size &&
                 (t > bt || (t == bt && suspect->commit < best->commit)))) {
                best = suspect;
                best_size = size;
            }
        }
        return best->commit;
    }
    case SelectionStrategy::PrSelect: {
        std::vector<const Suspect*> secured;
        for (const auto* suspect : live)
            if (suspect->secured)
                secured.push_back(suspect);
        if (!secured.empty())
            return newest(secured);
        return newest(live);
    }
    }
    return std::nullopt;
}

std::vector<TraceResult> run_variant(const TraceContext& ctx,
                                     const VariantId& variant,
                                     const std::vector<fix::FixRecord>& fixes,
                                     const std::vector<DistinctBug>& bugs) {
    std::map<forge::IssueRef, const DistinctBug*> bug_index;
    for (const auto& bug : bugs)
        bug_index.emplace(bug.canonical, &bug);

    std::vector<std::optional<TraceResult>> slots(fixes.size());

    parallel::parallel_for(fixes.size(), ctx.jobs, [&](std::size_t i) {
        const auto& fix = fixes[i];
        if (fix.via == fix::MatchRoute::None || !fix.fixing_commit)
            return;
        auto bug_it = bug_index.find(fix.bug);
        if (bug_it == bug_index.end())
            return;
        const DistinctBug& bug = *bug_it->second;

        const forge::PullRequest* pull = nullptr;
        const pr::InnerCommitMap* fix_map = nullptr;
        if (fix.fixing_pr) {
            pull = ctx.snapshot.find_pull(fix.fixing_pr->key);
            if (ctx.inner_maps != nullptr) {
                auto it = ctx.inner_maps->find(fix.fixing_pr->key);
                if (it != ctx.inner_maps->end())
                    fix_map = &it->second;
            }
        }

        TraceResult result;
        result.bug = bug.canonical;
        result.fix = *fix.fixing_commit;
        result.variant = variant;

        auto fix_commit = ctx.repo.commit(*fix.fixing_commit);
        if (fix_commit->parents.empty()) {
            result.note = "fixing commit is a root commit";
            slots[i] = std::move(result);
            return;
        }

        FilteredFix filtered;
        filtered.fix = fix;
        if (variant.f1 && fix_map != nullptr) {
            filtered.base =
                filter::diff_base_f1(ctx.repo, *fix.fixing_commit, fix_map);
            filtered.filters_applied.insert(filter::AppliedFilter::F1);
        } else {
            filtered.base = fix_commit->parents.front();
        }
        filtered.files =
            vcs::diff_commits(ctx.repo, filtered.base, *fix.fixing_commit);
        result.trace_base = filtered.base;

        if (variant.f2 && pull != nullptr && fix_map != nullptr) {
            bool applied = false;
            filtered.files =
                filter::filter_files_f2(std::move(filtered.files), *pull, applied);
            if (applied)
                filtered.filters_applied.insert(filter::AppliedFilter::F2);
        }
        if (variant.f3 && pull != nullptr && fix_map != nullptr) {
            bool applied = false;
            filtered.files = filter::filter_files_f3(std::move(filtered.files),
                                                     *pull, *fix_map, bug, applied);
            if (applied)
                filtered.filters_applied.insert(filter::AppliedFilter::F3);
        }
        if (variant.size_threshold) {
            auto outcome = filter::apply_size_threshold(std::move(filtered.files),
                                                        ctx.thresholds);
            if (auto* rejection = std::get_if<filter::SizeRejection>(&outcome)) {
                result.rejected_by_size = true;
                result.note = rejection->reason;
                slots[i] = std::move(result);
                return;
            }
            filtered.files = std::get<std::vector<FileDiff>>(std::move(outcome));
            filtered.filters_applied.insert(filter::AppliedFilter::SizeThreshold);
        }

        std::vector<std::string> skipped_files;
        auto suspects = trace_suspects(ctx, filtered, variant, &skipped_files);
        for (const auto& skipped : skipped_files) {
            if (!result.note.empty())
                result.note += "; ";
            result.note += "skipped " + skipped;
        }

        RejectionRuleSet rules;
        rules.temporal = variant.temporal;
        rules.pr_temporal = variant.s1 && pull != nullptr;
        suspects = reject_suspects(std::move(suspects), bug, pull,
                                   variant.f1 ? fix_map : nullptr, rules,
                                   ctx.repo);

        if (variant.s2 && ctx.graph != nullptr && ctx.inner_maps != nullptr &&
            fix.fixing_pr) {
            suspects = mark_secured(std::move(suspects), *fix.fixing_pr,
                                    *ctx.graph, *ctx.inner_maps);
            if (ctx.secured_suppresses)
                suspects = apply_secured_suppression(std::move(suspects));
        }

        if (variant.selection)
            result.selected = select_inducing(suspects, *variant.selection, ctx);

        if (variant.s3 && ctx.inner_maps != nullptr) {
            for (const auto& suspect : suspects) {
                if (suspect.rejected())
                    continue;
                const pr::InnerCommitMap* sus_map = nullptr;
                const forge::PullRequest* sus_pull = nullptr;
                for (const auto& [key, map] : *ctx.inner_maps) {
                    if (map.contains(suspect.commit)) {
                        sus_map = &map;
                        sus_pull = ctx.snapshot.find_pull(key);
                        break;
                    }
                }
                auto entries =
                    refine_fine_grained(ctx, suspect, sus_map, sus_pull, filtered);
                result.fine_grained.insert(result.fine_grained.end(),
                                           entries.begin(), entries.end());
            }
        }

        result.suspects = std::move(suspects);
        slots[i] = std::move(result);
    });

    std::vector<TraceResult> results;
    for (auto& slot : slots)
        if (slot)
            results.push_back(std::move(*slot));
    return results;
}

} // namespace prszz::trace
