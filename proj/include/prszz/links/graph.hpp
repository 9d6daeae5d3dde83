#pragma once

#include "prszz/forge/model.hpp"
#include "prszz/links/patterns.hpp"
#include "prszz/pr/reconstruct.hpp"
#include "prszz/vcs/repository.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace prszz::links {

// A graph node: an issue ticket, a pull request, or a VCS commit.
struct NodeKey {
    bool is_commit = false;
    forge::IssueRef ref;     // valid when !is_commit
    vcs::ObjectId commit_id; // valid when is_commit

    static NodeKey issue(forge::IssueRef r) { return {false, std::move(r), {}}; }
    static NodeKey commit(vcs::ObjectId id) { return {true, {}, id}; }

    bool operator==(const NodeKey&) const = default;
    bool operator<(const NodeKey& other) const {
        if (is_commit != other.is_commit)
            return !is_commit; // issues/PRs sort before commits
        if (is_commit)
            return commit_id < other.commit_id;
        return ref < other.ref;
    }

    std::string system_string() const {
        return is_commit ? "commit" : std::string(forge::system_name(ref.system));
    }
    std::string key_string() const {
        return is_commit ? commit_id.hex() : ref.key;
    }
};

enum class Provenance { Integrated, Mention, TextMatch, Transitive };

std::string_view provenance_name(Provenance provenance);

struct LinkEdge {
    NodeKey src;
    NodeKey dst;
    Provenance provenance = Provenance::TextMatch;
    std::string location; // field/comment id where found
    std::string kind;     // forge link_kind ("duplicate", "mention", ...)
};

class LinkGraph {
public:
    // Self-edges are dropped; (src, dst, provenance, location) is unique.
    void add_edge(LinkEdge edge);

    const std::vector<LinkEdge>& edges() const { return edges_; }
    std::vector<const LinkEdge*> edges_from(const NodeKey& node) const;
    std::vector<const LinkEdge*> edges_to(const NodeKey& node) const;
    bool linked_either_direction(const NodeKey& a, const NodeKey& b) const;
    std::set<NodeKey> nodes() const;

    // Edge-list dump: src_system, src_key, dst_system, dst_key, provenance,
    // location.
    void dump_csv(const std::filesystem::path& path) const;

private:
    std::vector<LinkEdge> edges_;
    std::set<std::tuple<NodeKey, NodeKey, Provenance, std::string>> seen_;
    std::multimap<NodeKey, std::size_t> by_src_;
    std::multimap<NodeKey, std::size_t> by_dst_;
};

struct GraphOptions {
    std::set<std::string> project_keys;
    LinkPatternConfig patterns = LinkPatternConfig::defaults();
};

// Edges from forge-integrated links, platform mentions, regex hits over
// title/description/comments/reviews and commit messages, and PR->commit
// edges from the reconstructed inner-commit maps.
LinkGraph build_graph(const forge::Snapshot& snapshot,
                      const vcs::Repository* repo,
                      const std::vector<pr::InnerCommitMap>& inner_maps,
                      const GraphOptions& options);

// Depth-2 inference for ticket->PR->ticket and ticket->ticket->PR paths.
// Idempotent.
LinkGraph add_transitive_edges(LinkGraph graph);

} // namespace prszz::links
