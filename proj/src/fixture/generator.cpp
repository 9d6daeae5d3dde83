#include "prszz/fixture/generator.hpp"

#include "prszz/fixture/git_writer.hpp"
#include "prszz/fixture/oracle.hpp"
#include "prszz/forge/snapshot_store.hpp"
#include "prszz/support/errors.hpp"
#include "prszz/support/json_io.hpp"
#include "prszz/support/strings.hpp"
#include "prszz/vcs/diff.hpp"
#include "prszz/vcs/repository.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace prszz::fixture {

namespace fs = std::filesystem;
using forge::IssueRef;
using forge::System;
using vcs::ObjectId;

namespace {

constexpr std::int64_t kBase = 1600000000;
constexpr std::int64_t kStep = 1000;

vcs::Signature bot(std::int64_t time) {
    return {"Fixture Bot", "fixture@example.invalid", time, "+0000"};
}

std::vector<std::string> to_lines(const std::string& content) {
    std::vector<std::string> out;
    for (auto line : strings::split_lines(content))
        out.emplace_back(line);
    return out;
}

std::string render(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

IssueRef parse_entity(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw FixtureError("malformed entity reference '" + text + "'");
    IssueRef ref;
    ref.system = forge::parse_system(text.substr(0, colon));
    ref.key = text.substr(colon + 1);
    return ref;
}

struct PendingInner {
    CommitSpec spec;
    ObjectId id;
    FileTree before;
    FileTree after;
    std::string message;
    std::int64_t time;
};

struct PendingPr {
    Action open;
    std::int64_t created_at = 0;
    ObjectId branch_base;
    FileTree base_files;
    FileTree branch_files;
    std::vector<PendingInner> inners;
    std::vector<forge::Comment> comments;
    std::vector<forge::IntegratedLink> links;
};

class Generator {
public:
    Generator(const FixtureScript& script, const fs::path& out_dir)
        : script_(script), out_(out_dir),
          writer_(GitRepoWriter::init(out_dir / "repo", "main")) {}

    GeneratedFixture run(bool verify) {
        for (std::size_t i = 0; i < script_.actions.size(); ++i) {
            time_ = kBase + static_cast<std::int64_t>(i) * kStep;
            apply(script_.actions[i]);
        }
        finish_open_prs();

        snapshot_.project_id = script_.project_id;
        snapshot_.fetched_at =
            kBase + static_cast<std::int64_t>(script_.actions.size()) * kStep;
        snapshot_.sort_entries();

        resolve_truth();
        if (verify)
            verify_truth();

        forge::save_snapshot(snapshot_, out_ / "snapshot");
        truth_.save(out_ / "ground_truth.json");
        write_manifest();

        GeneratedFixture result;
        result.repo_dir = out_ / "repo";
        result.snapshot_dir = out_ / "snapshot";
        result.truth_path = out_ / "ground_truth.json";
        result.mainline = mainline_;
        result.pr_resolving = pr_resolving_;
        result.snapshot = snapshot_;
        result.truth = truth_;
        return result;
    }

private:
    void apply(const Action& action) {
        switch (action.kind) {
        case Action::Kind::CreateFile:
        case Action::Kind::EditLines:
        case Action::Kind::SetMode:
            apply_file_action(action);
            break;
        case Action::Kind::OpenPr:
            open_pr(action);
            break;
        case Action::Kind::MergePr:
            merge_pr(action);
            break;
        case Action::Kind::FileTicket:
            file_ticket(action);
            break;
        case Action::Kind::Comment:
            add_comment(action);
            break;
        case Action::Kind::Link:
            add_link(action);
            break;
        }
    }

    static void apply_edit(FileTree& files, const Action& action) {
        if (action.kind == Action::Kind::CreateFile) {
            files[action.path] = FileState{render(action.lines), false};
            for (const auto& [path, lines] : action.extra_files)
                files[path] = FileState{render(lines), false};
            return;
        }
        if (action.kind == Action::Kind::SetMode) {
            auto it = files.find(action.path);
            if (it == files.end())
                throw FixtureError("set_mode on missing file " + action.path);
            it->second.executable = action.executable;
            return;
        }
        auto it = files.find(action.path);
        if (it == files.end())
            throw FixtureError("edit_lines on missing file " + action.path);
        auto lines = to_lines(it->second.content);
        for (const auto& edit : action.edits) {
            if (edit.at < 1 || edit.at > static_cast<int>(lines.size()) + 1)
                throw FixtureError("edit position " + std::to_string(edit.at) +
                                   " out of range in " + action.path);
            auto begin = lines.begin() + (edit.at - 1);
            int removable = std::min<int>(
                edit.remove, static_cast<int>(lines.end() - begin));
            lines.erase(begin, begin + removable);
            lines.insert(lines.begin() + (edit.at - 1), edit.insert.begin(),
                         edit.insert.end());
        }
        it->second.content = render(lines);
    }

    std::string default_message(const Action& action) const {
        if (!action.message.empty())
            return action.message;
        switch (action.kind) {
        case Action::Kind::CreateFile: return "create " + action.path;
        case Action::Kind::SetMode: return "set mode of " + action.path;
        default: return "edit " + action.path;
        }
    }

    void apply_file_action(const Action& action) {
        if (action.pr_number != 0) {
            auto it = pending_.find(action.pr_number);
            if (it == pending_.end())
                throw FixtureError("commit targets unopened pull request #" +
                                   std::to_string(action.pr_number));
            PendingPr& pr = it->second;
            FileTree before = pr.branch_files;
            apply_edit(pr.branch_files, action);

            PendingInner inner;
            inner.spec.tree = GitRepoWriter::hash_tree(pr.branch_files);
            inner.spec.parents = {pr.inners.empty() ? pr.branch_base
                                                    : pr.inners.back().id};
            inner.spec.author = bot(time_);
            inner.spec.committer = bot(time_);
            inner.spec.message = default_message(action) + "\n";
            inner.id = GitRepoWriter::hash_commit(inner.spec);
            inner.before = std::move(before);
            inner.after = pr.branch_files;
            inner.message = default_message(action);
            inner.time = time_;
            pr.inners.push_back(std::move(inner));
            return;
        }

        apply_edit(mainline_files_, action);
        commit_mainline(default_message(action));
    }

    ObjectId commit_mainline(const std::string& message,
                             std::vector<ObjectId> extra_parents = {},
                             std::optional<vcs::Signature> author = {},
                             std::optional<std::int64_t> committer_time = {}) {
        CommitSpec spec;
        spec.tree = writer_.write_tree(mainline_files_);
        if (!mainline_.empty())
            spec.parents.push_back(mainline_.back());
        for (const auto& parent : extra_parents)
            spec.parents.push_back(parent);
        spec.author = author.value_or(bot(time_));
        spec.committer = bot(committer_time.value_or(time_));
        spec.message = message + "\n";
        ObjectId id = writer_.write_commit(spec);
        mainline_.push_back(id);
        writer_.update_ref("refs/heads/main", id);
        return id;
    }

    void open_pr(const Action& action) {
        if (mainline_.empty())
            throw FixtureError("open_pr before any mainline commit");
        PendingPr pr;
        pr.open = action;
        pr.created_at = time_ - action.backdate;
        pr.branch_base = mainline_.back();
        pr.base_files = mainline_files_;
        pr.branch_files = mainline_files_;
        pending_.emplace(action.pr_number, std::move(pr));
    }

    // Per-file change lists as the forge would report them.
    std::optional<std::vector<forge::InnerFileChange>>
    inner_files(const PendingInner& inner) const {
        std::vector<forge::InnerFileChange> changes;
        std::set<std::string> paths;
        for (const auto& [path, state] : inner.after)
            paths.insert(path);
        for (const auto& [path, state] : inner.before)
            paths.insert(path);
        for (const auto& path : paths) {
            auto before = inner.before.find(path);
            auto after = inner.after.find(path);
            std::string old_content =
                before == inner.before.end() ? "" : before->second.content;
            std::string new_content =
                after == inner.after.end() ? "" : after->second.content;
            if (old_content == new_content)
                continue;
            forge::InnerFileChange change;
            change.path = path;
            for (const auto& hunk : vcs::diff_lines(old_content, new_content)) {
                change.added_lines += static_cast<int>(hunk.added.size());
                change.removed_lines += static_cast<int>(hunk.removed.size());
                if (!hunk.added.empty())
                    change.added_ranges.emplace_back(
                        hunk.added.front().first,
                        static_cast<int>(hunk.added.size()));
            }
            changes.push_back(std::move(change));
        }
        return changes;
    }

    void merge_pr(const Action& action) {
        auto it = pending_.find(action.pr_number);
        if (it == pending_.end())
            throw FixtureError("merge_pr for unopened pull request #" +
                               std::to_string(action.pr_number));
        PendingPr pr = std::move(it->second);
        pending_.erase(it);
        if (pr.inners.empty())
            throw FixtureError("merge_pr #" + std::to_string(action.pr_number) +
                               " without inner commits");

        // Branch delta relative to the PR base, checked against concurrent
        // mainline edits of the same paths.
        std::set<std::string> touched;
        for (const auto& [path, state] : pr.branch_files) {
            auto base = pr.base_files.find(path);
            if (base == pr.base_files.end() ||
                base->second.content != state.content ||
                base->second.executable != state.executable)
                touched.insert(path);
        }
        for (const auto& [path, state] : pr.base_files)
            if (!pr.branch_files.contains(path))
                touched.insert(path);

        for (const auto& path : touched) {
            auto base = pr.base_files.find(path);
            auto current = mainline_files_.find(path);
            bool base_present = base != pr.base_files.end();
            bool current_present = current != mainline_files_.end();
            bool mainline_changed =
                base_present != current_present ||
                (base_present && current_present &&
                 (base->second.content != current->second.content ||
                  base->second.executable != current->second.executable));
            if (mainline_changed)
                throw FixtureError("conflicting edits of " + path +
                                   " between mainline and pull request #" +
                                   std::to_string(action.pr_number));
        }

        auto apply_branch = [&]() {
            for (const auto& path : touched) {
                auto state = pr.branch_files.find(path);
                if (state == pr.branch_files.end())
                    mainline_files_.erase(path);
                else
                    mainline_files_[path] = state->second;
            }
        };

        const std::string& strategy = pr.open.strategy;
        ObjectId resolving;

        if (strategy == "merge") {
            for (const auto& inner : pr.inners) {
                writer_.write_tree(inner.after); // blobs + trees
                writer_.write_commit(inner.spec);
            }
            apply_branch();
            for (const auto& extra : action.extra_edits)
                apply_edit(mainline_files_, extra);
            resolving = commit_mainline(
                "Merge pull request #" + std::to_string(pr.open.pr_number) +
                    " from fixture/" + std::to_string(pr.open.pr_number),
                {pr.inners.back().id});
        } else if (strategy == "squash") {
            apply_branch();
            for (const auto& extra : action.extra_edits)
                apply_edit(mainline_files_, extra);
            std::string message = pr.open.title + " (#" +
                                  std::to_string(pr.open.pr_number) + ")";
            std::string body;
            for (const auto& inner : pr.inners)
                body += "* " + inner.message + "\n";
            resolving = commit_mainline(message + "\n\n" + body);
        } else if (strategy == "rebase") {
            if (!action.extra_edits.empty())
                throw FixtureError("extra_edits are only meaningful for "
                                   "squash/merge integration");
            for (std::size_t i = 0; i < pr.inners.size(); ++i) {
                const auto& inner = pr.inners[i];
                // Replay the inner delta on the current mainline state.
                std::set<std::string> paths;
                for (const auto& [path, state] : inner.after)
                    paths.insert(path);
                for (const auto& [path, state] : inner.before)
                    paths.insert(path);
                for (const auto& path : paths) {
                    auto before = inner.before.find(path);
                    auto after = inner.after.find(path);
                    bool changed =
                        (before == inner.before.end()) !=
                            (after == inner.after.end()) ||
                        (before != inner.before.end() &&
                         after != inner.after.end() &&
                         (before->second.content != after->second.content ||
                          before->second.executable != after->second.executable));
                    if (!changed)
                        continue;
                    if (after == inner.after.end())
                        mainline_files_.erase(path);
                    else
                        mainline_files_[path] = after->second;
                }
                resolving = commit_mainline(
                    inner.message, {}, bot(inner.time),
                    time_ + static_cast<std::int64_t>(i));
            }
        } else {
            throw FixtureError("unknown merge strategy '" + strategy + "'");
        }

        pr_resolving_[pr.open.pr_number] = resolving;
        {
            // VCS equivalents of the inner commits, for @inner references
            // and truth verification.
            std::vector<ObjectId> vcs_ids;
            for (std::size_t i = 0; i < pr.inners.size(); ++i) {
                if (strategy == "merge")
                    vcs_ids.push_back(pr.inners[i].id);
                else if (strategy == "squash")
                    vcs_ids.push_back(resolving);
                else
                    vcs_ids.push_back(
                        mainline_[mainline_.size() - pr.inners.size() + i]);
            }
            pr_vcs_commits_[pr.open.pr_number] = std::move(vcs_ids);
        }

        forge::PullRequest pull;
        pull.ref = {System::PullRequest, std::to_string(pr.open.pr_number)};
        pull.title = pr.open.title;
        pull.description = pr.open.body;
        pull.state = forge::PrState::Closed;
        pull.merged = true;
        pull.merge_commit = resolving;
        pull.created_at = pr.created_at;
        pull.closed_at = time_;
        pull.assignee = pr.open.assignee;
        for (const auto& label : pr.open.labels)
            pull.labels.insert(label);
        for (const auto& inner : pr.inners) {
            forge::InnerCommit commit;
            commit.hash = inner.id;
            commit.message = inner.message;
            commit.author_name = "Fixture Bot";
            commit.author_email = "fixture@example.invalid";
            commit.author_time = inner.time;
            commit.files = inner_files(inner);
            pull.inner_commits.push_back(std::move(commit));
        }
        pull.comments = pr.comments;
        pull.integrated_links = pr.links;
        snapshot_.pulls.push_back(std::move(pull));
    }

    void file_ticket(const Action& action) {
        IssueRef ref = parse_entity(action.entity);
        forge::IssueTicket ticket;
        ticket.ref = ref;
        ticket.title = action.title;
        ticket.description = action.body;
        for (const auto& label : action.labels)
            ticket.labels.insert(label);
        ticket.status = action.status.value_or(
            ref.system == System::JiraIssue ? "Resolved" : "Closed");
        if (ref.system == System::JiraIssue)
            ticket.resolution = action.resolution.value_or("Fixed");
        else
            ticket.resolution = action.resolution;
        ticket.created_at = time_;
        ticket.closed_at = time_ + action.closed_after.value_or(500);
        ticket.assignee = action.assignee;
        snapshot_.issues.push_back(std::move(ticket));
    }

    void add_comment(const Action& action) {
        IssueRef ref = parse_entity(action.entity);
        forge::Comment comment{"Fixture Bot", time_, action.text};
        if (ref.system == System::PullRequest) {
            int number = std::stoi(ref.key);
            if (auto it = pending_.find(number); it != pending_.end()) {
                it->second.comments.push_back(std::move(comment));
                return;
            }
            for (auto& pull : snapshot_.pulls)
                if (pull.ref == ref) {
                    pull.comments.push_back(std::move(comment));
                    return;
                }
            throw FixtureError("comment on unknown pull request " + ref.key);
        }
        for (auto& issue : snapshot_.issues)
            if (issue.ref == ref) {
                issue.comments.push_back(std::move(comment));
                return;
            }
        throw FixtureError("comment on unknown ticket " + action.entity);
    }

    void add_link(const Action& action) {
        IssueRef from = parse_entity(action.entity);
        IssueRef to = parse_entity(action.target);
        forge::IntegratedLink link{to, action.kind_label};

        if (from.system == System::PullRequest) {
            int number = std::stoi(from.key);
            if (auto it = pending_.find(number); it != pending_.end()) {
                it->second.links.push_back(std::move(link));
                return;
            }
            for (auto& pull : snapshot_.pulls)
                if (pull.ref == from) {
                    pull.integrated_links.push_back(std::move(link));
                    return;
                }
            throw FixtureError("link from unknown pull request " + from.key);
        }
        for (auto& issue : snapshot_.issues)
            if (issue.ref == from) {
                issue.integrated_links.push_back(std::move(link));
                return;
            }
        throw FixtureError("link from unknown ticket " + action.entity);
    }

    void finish_open_prs() {
        for (auto& [number, pr] : pending_) {
            forge::PullRequest pull;
            pull.ref = {System::PullRequest, std::to_string(number)};
            pull.title = pr.open.title;
            pull.description = pr.open.body;
            pull.state = forge::PrState::Open;
            pull.created_at = pr.created_at;
            pull.assignee = pr.open.assignee;
            for (const auto& label : pr.open.labels)
                pull.labels.insert(label);
            for (const auto& inner : pr.inners) {
                forge::InnerCommit commit;
                commit.hash = inner.id;
                commit.message = inner.message;
                commit.author_name = "Fixture Bot";
                commit.author_email = "fixture@example.invalid";
                commit.author_time = inner.time;
                commit.files = inner_files(inner);
                pull.inner_commits.push_back(std::move(commit));
            }
            pull.comments = pr.comments;
            pull.integrated_links = pr.links;
            snapshot_.pulls.push_back(std::move(pull));
        }
        pending_.clear();
    }

    ObjectId resolve_commit_ref(const std::string& text) const {
        if (text.starts_with("@inner:")) {
            auto rest = text.substr(7);
            auto colon = rest.find(':');
            if (colon == std::string::npos)
                throw FixtureError("malformed inner reference '" + text + "'");
            int number = std::stoi(rest.substr(0, colon));
            int index = std::stoi(rest.substr(colon + 1));
            auto it = pr_vcs_commits_.find(number);
            if (it == pr_vcs_commits_.end() || index < 1 ||
                index > static_cast<int>(it->second.size()))
                throw FixtureError("no VCS commit for " + text);
            return it->second[static_cast<std::size_t>(index - 1)];
        }
        if (text.starts_with("@commit:")) {
            int index = std::stoi(text.substr(8));
            if (index < 1 || index > static_cast<int>(mainline_.size()))
                throw FixtureError("mainline commit index out of range: " + text);
            return mainline_[static_cast<std::size_t>(index - 1)];
        }
        if (text.starts_with("@pr:")) {
            int number = std::stoi(text.substr(4));
            auto it = pr_resolving_.find(number);
            if (it == pr_resolving_.end())
                throw FixtureError("no resolving commit for " + text);
            return it->second;
        }
        if (auto id = vcs::ObjectId::parse(text))
            return *id;
        throw FixtureError("malformed commit reference '" + text + "'");
    }

    void resolve_truth() {
        for (const auto& [bug, commit] : script_.truth_fixing) {
            IssueRef ref = parse_entity(bug);
            if (commit)
                truth_.fixing.emplace(ref, resolve_commit_ref(*commit));
            else
                truth_.fixing.emplace(ref, std::nullopt);
        }
        for (const auto& [fix, commits] : script_.truth_inducing) {
            ObjectId fix_id = resolve_commit_ref(fix);
            std::set<ObjectId> set;
            for (const auto& text : commits)
                set.insert(resolve_commit_ref(text));
            truth_.inducing.emplace(fix_id, std::move(set));
        }
    }

    // The declared inducing commits must be contained in the replay-oracle
    // suspect set of the declared fixing commit.
    void verify_truth() const {
        if (truth_.inducing.empty())
            return;
        auto repo = vcs::Repository::open(out_ / "repo");
        auto profiles = lang::ProfileRegistry::builtin();

        for (const auto& [fix, expected] : truth_.inducing) {
            // f1 base: first-parent ancestor outside the PR owning this
            // commit, if any.
            std::set<ObjectId> members{fix};
            for (const auto& [number, vcs_ids] : pr_vcs_commits_) {
                bool owns = pr_resolving_.at(number) == fix ||
                            std::find(vcs_ids.begin(), vcs_ids.end(), fix) !=
                                vcs_ids.end();
                if (!owns)
                    continue;
                members.insert(pr_resolving_.at(number));
                members.insert(vcs_ids.begin(), vcs_ids.end());
            }
            ObjectId base = fix;
            while (true) {
                auto commit = repo.commit(base);
                if (commit->parents.empty())
                    throw FixtureError("fixing commit " + fix.hex() +
                                       " has no ancestor outside its PR");
                base = commit->parents.front();
                if (!members.contains(base))
                    break;
            }

            auto oracle = replay_suspects(repo, base, fix, /*method_trace=*/true,
                                          &profiles, 25, /*deep=*/true);
            for (const auto& id : expected) {
                if (!oracle.contains(id))
                    throw FixtureError(
                        "declared inducing commit " + id.hex() +
                        " is not reachable from fixing commit " + fix.hex() +
                        " by the replay oracle: the script is unrealizable");
            }
        }
    }

    void write_manifest() const {
        nlohmann::json mainline = nlohmann::json::array();
        for (const auto& id : mainline_)
            mainline.push_back(id.hex());
        nlohmann::json prs = nlohmann::json::object();
        for (const auto& [number, id] : pr_resolving_)
            prs[std::to_string(number)] = id.hex();
        json_io::write_file(out_ / "fixture_manifest.json",
                            nlohmann::json{{"project_id", script_.project_id},
                                           {"mainline", std::move(mainline)},
                                           {"pull_requests", std::move(prs)}});
    }

    const FixtureScript& script_;
    fs::path out_;
    GitRepoWriter writer_;
    std::int64_t time_ = kBase;

    FileTree mainline_files_;
    std::vector<ObjectId> mainline_;
    std::map<int, PendingPr> pending_;
    std::map<int, ObjectId> pr_resolving_;
    std::map<int, std::vector<ObjectId>> pr_vcs_commits_;
    forge::Snapshot snapshot_;
    eval::GroundTruth truth_;
};

} // namespace

GeneratedFixture generate_fixture(const FixtureScript& script,
                                  const fs::path& out_dir, bool verify) {
    fs::create_directories(out_dir);
    Generator generator(script, out_dir);
    return generator.run(verify);
}

} // namespace prszz::fixture
