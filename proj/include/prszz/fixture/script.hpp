#pragma once

#include "prszz/forge/model.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prszz::fixture {

// One line edit: delete `remove` lines at `at` (1-based), then insert
// `insert` before that position. Edits apply sequentially.
struct LineEdit {
    int at = 1;
    int remove = 0;
    std::vector<std::string> insert;
};

struct Action {
    enum class Kind {
        CreateFile,
        EditLines,
        SetMode,
        OpenPr,
        MergePr,
        FileTicket,
        Comment,
        Link
    };
    Kind kind = Kind::CreateFile;

    // CreateFile / EditLines / SetMode
    std::string path;
    std::vector<std::string> lines;
    // CreateFile: additional files created in the same commit.
    std::vector<std::pair<std::string, std::vector<std::string>>> extra_files;
    std::vector<LineEdit> edits;
    bool executable = false;
    std::string message;

    // OpenPr / MergePr
    int pr_number = 0;
    std::string strategy; // "merge" | "squash" | "rebase"
    std::string title;
    std::string body;
    std::vector<std::string> labels;
    std::optional<std::string> assignee;
    // Seconds to subtract from the forge created_at relative to the action
    // time: models a PR opened earlier whose branch was later force-pushed
    // onto a newer base.
    std::int64_t backdate = 0;
    // MergePr: edits landing only in the integration commit (models a fixing
    // commit that integrates more than one pull request).
    std::vector<Action> extra_edits;

    // FileTicket / Comment / Link
    std::string entity;  // "github:12" | "jira:PROJ-3" | "pull:7"
    std::string target;  // Link target
    std::string kind_label; // link kind
    std::string text;    // Comment text
    std::optional<std::string> status;
    std::optional<std::string> resolution;
    std::optional<std::int64_t> closed_after; // seconds after creation
};

// Declared ground truth, with commit references resolved at generation time:
//   "@commit:N"  N-th mainline commit (1-based)
//   "@pr:N"      resolving commit of pull request N
//   null         bug resolved without a fixing commit
struct FixtureScript {
    std::string project_id = "fixture";
    std::vector<std::string> jira_project_keys;
    std::vector<Action> actions;
    std::map<std::string, std::optional<std::string>> truth_fixing;
    std::map<std::string, std::vector<std::string>> truth_inducing;

    static FixtureScript from_json(const nlohmann::json& value);
    nlohmann::json to_json() const;
};

} // namespace prszz::fixture
