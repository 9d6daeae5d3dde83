#include "prszz/eval/metrics.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/json_io.hpp"
#include "prszz/support/strings.hpp"

#include <nlohmann/json.hpp>

namespace prszz::eval {

using nlohmann::json;

void Metrics::finalize() {
    precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    f_score = (precision + recall) > 0.0
                  ? 2.0 * precision * recall / (precision + recall)
                  : 0.0;
}

namespace {

forge::IssueRef parse_bug_key(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw SchemaViolation("malformed bug key '" + text + "'");
    forge::IssueRef ref;
    ref.system = forge::parse_system(text.substr(0, colon));
    ref.key = text.substr(colon + 1);
    return ref;
}

vcs::ObjectId parse_commit(const std::string& hex, const std::string& where) {
    auto id = vcs::ObjectId::parse(hex);
    if (!id)
        throw SchemaViolation("malformed commit id '" + hex + "' in " + where);
    return *id;
}

} // namespace

GroundTruth GroundTruth::from_json(const json& value) {
    GroundTruth truth;
    if (auto fixing = value.find("fixing"); fixing != value.end()) {
        for (const auto& [key, commit] : fixing->items()) {
            if (commit.is_null())
                truth.fixing.emplace(parse_bug_key(key), std::nullopt);
            else
                truth.fixing.emplace(
                    parse_bug_key(key),
                    parse_commit(commit.get<std::string>(), "fixing"));
        }
    }
    if (auto inducing = value.find("inducing"); inducing != value.end()) {
        for (const auto& [fix_hex, commits] : inducing->items()) {
            auto fix_id = parse_commit(fix_hex, "inducing");
            std::set<vcs::ObjectId> set;
            for (const auto& hex : commits)
                set.insert(parse_commit(hex.get<std::string>(), "inducing"));
            truth.inducing.emplace(fix_id, std::move(set));
        }
    }
    return truth;
}

json GroundTruth::to_json() const {
    json fixing = json::object();
    for (const auto& [bug, commit] : this->fixing) {
        if (commit)
            fixing[bug.to_string()] = commit->hex();
        else
            fixing[bug.to_string()] = nullptr;
    }
    json inducing = json::object();
    for (const auto& [fix, commits] : this->inducing) {
        json list = json::array();
        for (const auto& id : commits)
            list.push_back(id.hex());
        inducing[fix.hex()] = std::move(list);
    }
    return json{{"fixing", std::move(fixing)}, {"inducing", std::move(inducing)}};
}

GroundTruth GroundTruth::load(const std::filesystem::path& path) {
    return from_json(json_io::read_file(path));
}

void GroundTruth::save(const std::filesystem::path& path) const {
    json_io::write_file(path, to_json());
}

Metrics eval_fixing(const std::vector<fix::FixRecord>& predictions,
                    const GroundTruth& truth) {
    Metrics metrics;
    for (const auto& record : predictions) {
        auto it = truth.fixing.find(record.bug);
        if (it == truth.fixing.end())
            throw MissingTruth("no fixing truth for bug " + record.bug.to_string());
        const auto& expected = it->second;

        if (record.fixing_commit) {
            if (expected && *record.fixing_commit == *expected) {
                ++metrics.tp;
            } else {
                ++metrics.fp;
                if (expected)
                    ++metrics.fn;
            }
        } else if (expected) {
            ++metrics.fn;
        }
        // no prediction and null truth: correctly unmapped, ignored
    }
    metrics.finalize();
    return metrics;
}

Metrics eval_inducing(const std::vector<trace::TraceResult>& results,
                      const GroundTruth& truth, bool use_selected) {
    Metrics metrics;
    for (const auto& result : results) {
        auto it = truth.inducing.find(result.fix);
        if (it == truth.inducing.end())
            throw MissingTruth("no inducing truth for fix " + result.fix.hex());
        const auto& expected = it->second;

        std::set<vcs::ObjectId> predicted;
        if (use_selected) {
            if (result.selected)
                predicted.insert(*result.selected);
        } else {
            for (const auto& suspect : result.suspects)
                if (!suspect.rejected())
                    predicted.insert(suspect.commit);
        }

        for (const auto& id : predicted) {
            if (expected.contains(id))
                ++metrics.tp;
            else
                ++metrics.fp;
        }
        for (const auto& id : expected)
            if (!predicted.contains(id))
                ++metrics.fn;
    }
    metrics.finalize();
    return metrics;
}

double fixing_coverage(const std::vector<fix::FixRecord>& predictions) {
    if (predictions.empty())
        return 0.0;
    std::size_t mapped = 0;
    for (const auto& record : predictions)
        if (record.fixing_commit)
            ++mapped;
    return static_cast<double>(mapped) / static_cast<double>(predictions.size());
}

json metrics_to_json(const Metrics& metrics) {
    return json{{"precision", metrics.precision}, {"recall", metrics.recall},
                {"f_score", metrics.f_score},     {"tp", metrics.tp},
                {"fp", metrics.fp},               {"fn", metrics.fn}};
}

} // namespace prszz::eval
