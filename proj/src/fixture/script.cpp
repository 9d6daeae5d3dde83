#include "prszz/fixture/script.hpp"

#include "prszz/support/errors.hpp"

#include <nlohmann/json.hpp>

namespace prszz::fixture {

using nlohmann::json;

namespace {

Action action_from_json(const json& value);

json action_to_json(const Action& action) {
    json out;
    switch (action.kind) {
    case Action::Kind::CreateFile:
        out["action"] = "create_file";
        out["path"] = action.path;
        out["lines"] = action.lines;
        if (!action.extra_files.empty()) {
            json extra = json::object();
            for (const auto& [path, lines] : action.extra_files)
                extra[path] = lines;
            out["extra_files"] = std::move(extra);
        }
        if (action.pr_number != 0)
            out["pr"] = action.pr_number;
        break;
    case Action::Kind::EditLines: {
        out["action"] = "edit_lines";
        out["path"] = action.path;
        json edits = json::array();
        for (const auto& edit : action.edits)
            edits.push_back({{"at", edit.at},
                             {"remove", edit.remove},
                             {"insert", edit.insert}});
        out["edits"] = std::move(edits);
        if (action.pr_number != 0)
            out["pr"] = action.pr_number;
        break;
    }
    case Action::Kind::SetMode:
        out["action"] = "set_mode";
        out["path"] = action.path;
        out["executable"] = action.executable;
        if (action.pr_number != 0)
            out["pr"] = action.pr_number;
        break;
    case Action::Kind::OpenPr:
        out["action"] = "open_pr";
        out["number"] = action.pr_number;
        out["strategy"] = action.strategy;
        out["title"] = action.title;
        out["body"] = action.body;
        out["labels"] = action.labels;
        if (action.assignee)
            out["assignee"] = *action.assignee;
        if (action.backdate != 0)
            out["backdate"] = action.backdate;
        break;
    case Action::Kind::MergePr: {
        out["action"] = "merge_pr";
        out["number"] = action.pr_number;
        if (!action.extra_edits.empty()) {
            json extra = json::array();
            for (const auto& edit : action.extra_edits)
                extra.push_back(action_to_json(edit));
            out["extra_edits"] = std::move(extra);
        }
        break;
    }
    case Action::Kind::FileTicket:
        out["action"] = "file_ticket";
        out["entity"] = action.entity;
        out["title"] = action.title;
        out["body"] = action.body;
        out["labels"] = action.labels;
        if (action.assignee)
            out["assignee"] = *action.assignee;
        if (action.status)
            out["status"] = *action.status;
        if (action.resolution)
            out["resolution"] = *action.resolution;
        if (action.closed_after)
            out["closed_after"] = *action.closed_after;
        break;
    case Action::Kind::Comment:
        out["action"] = "comment";
        out["on"] = action.entity;
        out["text"] = action.text;
        break;
    case Action::Kind::Link:
        out["action"] = "link";
        out["from"] = action.entity;
        out["to"] = action.target;
        out["kind"] = action.kind_label;
        break;
    }
    if (!action.message.empty())
        out["message"] = action.message;
    return out;
}

Action action_from_json(const json& value) {
    Action action;
    std::string kind = value.at("action").get<std::string>();
    action.message = value.value("message", "");

    if (kind == "create_file") {
        action.kind = Action::Kind::CreateFile;
        action.path = value.at("path").get<std::string>();
        action.pr_number = value.value("pr", 0);
        for (const auto& line : value.value("lines", json::array()))
            action.lines.push_back(line.get<std::string>());
        if (auto extra = value.find("extra_files"); extra != value.end()) {
            for (const auto& [path, lines] : extra->items()) {
                std::vector<std::string> content;
                for (const auto& line : lines)
                    content.push_back(line.get<std::string>());
                action.extra_files.emplace_back(path, std::move(content));
            }
        }
    } else if (kind == "edit_lines") {
        action.kind = Action::Kind::EditLines;
        action.path = value.at("path").get<std::string>();
        action.pr_number = value.value("pr", 0);
        for (const auto& edit : value.value("edits", json::array())) {
            LineEdit line_edit;
            line_edit.at = edit.value("at", 1);
            line_edit.remove = edit.value("remove", 0);
            for (const auto& line : edit.value("insert", json::array()))
                line_edit.insert.push_back(line.get<std::string>());
            action.edits.push_back(std::move(line_edit));
        }
    } else if (kind == "set_mode") {
        action.kind = Action::Kind::SetMode;
        action.path = value.at("path").get<std::string>();
        action.pr_number = value.value("pr", 0);
        action.executable = value.value("executable", true);
    } else if (kind == "open_pr") {
        action.kind = Action::Kind::OpenPr;
        action.pr_number = value.at("number").get<int>();
        action.strategy = value.value("strategy", "squash");
        action.title = value.value("title", "");
        action.body = value.value("body", "");
        for (const auto& label : value.value("labels", json::array()))
            action.labels.push_back(label.get<std::string>());
        if (value.contains("assignee"))
            action.assignee = value.at("assignee").get<std::string>();
        action.backdate = value.value("backdate", std::int64_t{0});
    } else if (kind == "merge_pr") {
        action.kind = Action::Kind::MergePr;
        action.pr_number = value.at("number").get<int>();
        for (const auto& edit : value.value("extra_edits", json::array()))
            action.extra_edits.push_back(action_from_json(edit));
    } else if (kind == "file_ticket") {
        action.kind = Action::Kind::FileTicket;
        action.entity = value.at("entity").get<std::string>();
        action.title = value.value("title", "");
        action.body = value.value("body", "");
        for (const auto& label : value.value("labels", json::array()))
            action.labels.push_back(label.get<std::string>());
        if (value.contains("assignee"))
            action.assignee = value.at("assignee").get<std::string>();
        if (value.contains("status"))
            action.status = value.at("status").get<std::string>();
        if (value.contains("resolution"))
            action.resolution = value.at("resolution").get<std::string>();
        if (value.contains("closed_after"))
            action.closed_after = value.at("closed_after").get<std::int64_t>();
    } else if (kind == "comment") {
        action.kind = Action::Kind::Comment;
        action.entity = value.at("on").get<std::string>();
        action.text = value.value("text", "");
    } else if (kind == "link") {
        action.kind = Action::Kind::Link;
        action.entity = value.at("from").get<std::string>();
        action.target = value.at("to").get<std::string>();
        action.kind_label = value.value("kind", "integrated");
    } else {
        throw FixtureError("unknown fixture action '" + kind + "'");
    }
    return action;
}

} // namespace

FixtureScript FixtureScript::from_json(const json& value) {
    FixtureScript script;
    script.project_id = value.value("project_id", "fixture");
    for (const auto& key : value.value("jira_project_keys", json::array()))
        script.jira_project_keys.push_back(key.get<std::string>());
    for (const auto& action : value.value("actions", json::array()))
        script.actions.push_back(action_from_json(action));

    if (auto truth = value.find("truth"); truth != value.end()) {
        const json fixing = truth->value("fixing", json::object());
        for (const auto& [bug, commit] : fixing.items()) {
            if (commit.is_null())
                script.truth_fixing.emplace(bug, std::nullopt);
            else
                script.truth_fixing.emplace(bug, commit.get<std::string>());
        }
        const json inducing = truth->value("inducing", json::object());
        for (const auto& [fix, commits] : inducing.items()) {
            std::vector<std::string> list;
            for (const auto& ref : commits)
                list.push_back(ref.get<std::string>());
            script.truth_inducing.emplace(fix, std::move(list));
        }
    }
    return script;
}

json FixtureScript::to_json() const {
    json actions = json::array();
    for (const auto& action : this->actions)
        actions.push_back(action_to_json(action));

    json fixing = json::object();
    for (const auto& [bug, commit] : truth_fixing) {
        if (commit)
            fixing[bug] = *commit;
        else
            fixing[bug] = nullptr;
    }
    json inducing = json::object();
    for (const auto& [fix, commits] : truth_inducing)
        inducing[fix] = commits;

    return json{{"project_id", project_id},
                {"jira_project_keys", jira_project_keys},
                {"actions", std::move(actions)},
                {"truth", json{{"fixing", std::move(fixing)},
                               {"inducing", std::move(inducing)}}}};
}

} // namespace prszz::fixture
