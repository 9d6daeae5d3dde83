#include "prszz/links/graph.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"

#include <fstream>

namespace prszz::links {

using forge::IssueRef;
using forge::Snapshot;
using forge::System;

std::string_view provenance_name(Provenance provenance) {
    switch (provenance) {
    case Provenance::Integrated: return "integrated";
    case Provenance::Mention: return "mention";
    case Provenance::TextMatch: return "text_match";
    case Provenance::Transitive: return "transitive";
    }
    return "unknown";
}

void LinkGraph::add_edge(LinkEdge edge) {
    if (edge.src == edge.dst)
        return;
    auto key = std::make_tuple(edge.src, edge.dst, edge.provenance, edge.location);
    if (!seen_.insert(key).second)
        return;
    by_src_.emplace(edge.src, edges_.size());
    by_dst_.emplace(edge.dst, edges_.size());
    edges_.push_back(std::move(edge));
}

std::vector<const LinkEdge*> LinkGraph::edges_from(const NodeKey& node) const {
    std::vector<const LinkEdge*> out;
    auto [begin, end] = by_src_.equal_range(node);
    for (auto it = begin; it != end; ++it)
        out.push_back(&edges_[it->second]);
    return out;
}

std::vector<const LinkEdge*> LinkGraph::edges_to(const NodeKey& node) const {
    std::vector<const LinkEdge*> out;
    auto [begin, end] = by_dst_.equal_range(node);
    for (auto it = begin; it != end; ++it)
        out.push_back(&edges_[it->second]);
    return out;
}

bool LinkGraph::linked_either_direction(const NodeKey& a, const NodeKey& b) const {
    for (const auto* edge : edges_from(a))
        if (edge->dst == b)
            return true;
    for (const auto* edge : edges_from(b))
        if (edge->dst == a)
            return true;
    return false;
}

std::set<NodeKey> LinkGraph::nodes() const {
    std::set<NodeKey> out;
    for (const auto& edge : edges_) {
        out.insert(edge.src);
        out.insert(edge.dst);
    }
    return out;
}

void LinkGraph::dump_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "src_system,src_key,dst_system,dst_key,provenance,location\n";

    std::vector<const LinkEdge*> sorted;
    sorted.reserve(edges_.size());
    for (const auto& edge : edges_)
        sorted.push_back(&edge);
    std::sort(sorted.begin(), sorted.end(), [](const LinkEdge* a, const LinkEdge* b) {
        if (!(a->src == b->src))
            return a->src < b->src;
        if (!(a->dst == b->dst))
            return a->dst < b->dst;
        if (a->provenance != b->provenance)
            return a->provenance < b->provenance;
        return a->location < b->location;
    });
    for (const auto* edge : sorted) {
        out << edge->src.system_string() << ',' << edge->src.key_string() << ','
            << edge->dst.system_string() << ',' << edge->dst.key_string() << ','
            << provenance_name(edge->provenance) << ',' << edge->location << '\n';
    }
}

namespace {

// "#N" hits share GitHub's number space between issues and PRs; the snapshot
// decides which one N denotes.
IssueRef resolve_github_number(const IssueRef& ref, const Snapshot& snapshot) {
    if (ref.system != System::GithubIssue)
        return ref;
    if (snapshot.find_pull(ref.key) != nullptr)
        return IssueRef{System::PullRequest, ref.key};
    return ref;
}

Provenance integrated_provenance(const std::string& kind) {
    if (kind == "mention" || kind == "cross-reference" || kind == "cross-referenced")
        return Provenance::Mention;
    return Provenance::Integrated;
}

void add_integrated_edges(LinkGraph& graph, const NodeKey& src,
                          const std::vector<forge::IntegratedLink>& links,
                          const Snapshot& snapshot) {
    for (const auto& link : links) {
        LinkEdge edge;
        edge.src = src;
        edge.dst = NodeKey::issue(resolve_github_number(link.target, snapshot));
        edge.provenance = integrated_provenance(link.kind);
        edge.location = "integrated_links";
        edge.kind = link.kind;
        graph.add_edge(std::move(edge));
    }
}

void add_text_edges(LinkGraph& graph, const NodeKey& src, const std::string& text,
                    System context, const std::string& location,
                    const Snapshot& snapshot, const GraphOptions& options) {
    for (const auto& ref :
         extract_text_links(text, context, options.project_keys, options.patterns)) {
        LinkEdge edge;
        edge.src = src;
        edge.dst = NodeKey::issue(resolve_github_number(ref, snapshot));
        edge.provenance = Provenance::TextMatch;
        edge.location = location;
        graph.add_edge(std::move(edge));
    }
}

} // namespace

LinkGraph build_graph(const Snapshot& snapshot, const vcs::Repository* repo,
                      const std::vector<pr::InnerCommitMap>& inner_maps,
                      const GraphOptions& options) {
    LinkGraph graph;

    for (const auto& issue : snapshot.issues) {
        NodeKey node = NodeKey::issue(issue.ref);
        add_integrated_edges(graph, node, issue.integrated_links, snapshot);
        add_text_edges(graph, node, issue.title, issue.ref.system, "title",
                       snapshot, options);
        add_text_edges(graph, node, issue.description, issue.ref.system,
                       "description", snapshot, options);
        for (std::size_t i = 0; i < issue.comments.size(); ++i)
            add_text_edges(graph, node, issue.comments[i].text, issue.ref.system,
                           "comment:" + std::to_string(i), snapshot, options);
    }

    for (const auto& pull : snapshot.pulls) {
        NodeKey node = NodeKey::issue(pull.ref);
        add_integrated_edges(graph, node, pull.integrated_links, snapshot);
        add_text_edges(graph, node, pull.title, System::GithubIssue, "title",
                       snapshot, options);
        add_text_edges(graph, node, pull.description, System::GithubIssue,
                       "description", snapshot, options);
        for (std::size_t i = 0; i < pull.comments.size(); ++i)
            add_text_edges(graph, node, pull.comments[i].text, System::GithubIssue,
                           "comment:" + std::to_string(i), snapshot, options);
        for (std::size_t i = 0; i < pull.reviews.size(); ++i)
            add_text_edges(graph, node, pull.reviews[i].text, System::GithubIssue,
                           "review:" + std::to_string(i), snapshot, options);
    }

    if (repo != nullptr) {
        for (const auto& id : repo->all_commits()) {
            auto commit = repo->commit(id);
            add_text_edges(graph, NodeKey::commit(id), commit->message,
                           System::GithubIssue, "message", snapshot, options);
        }
    }

    for (const auto& map : inner_maps) {
        NodeKey pr_node = NodeKey::issue(map.pr);
        for (const auto& mapped : map.mapped_commits()) {
            LinkEdge edge;
            edge.src = pr_node;
            edge.dst = NodeKey::commit(mapped);
            edge.provenance = Provenance::Integrated;
            edge.location = "inner_commit_map";
            graph.add_edge(std::move(edge));
        }
    }

    return graph;
}

LinkGraph add_transitive_edges(LinkGraph graph) {
    auto is_ticket = [](const NodeKey& node) {
        return !node.is_commit && node.ref.system != System::PullRequest;
    };
    auto is_pull = [](const NodeKey& node) {
        return !node.is_commit && node.ref.system == System::PullRequest;
    };

    std::vector<LinkEdge> inferred;
    for (const auto& first : graph.edges()) {
        if (first.provenance == Provenance::Transitive)
            continue;
        for (const auto* second : graph.edges_from(first.dst)) {
            if (second->provenance == Provenance::Transitive)
                continue;
            const NodeKey& a = first.src;
            const NodeKey& b = first.dst;
            const NodeKey& c = second->dst;
            if (a == c)
                continue;
            bool ticket_pr_ticket = is_ticket(a) && is_pull(b) && is_ticket(c);
            bool ticket_ticket_pr = is_ticket(a) && is_ticket(b) && is_pull(c);
            if (!ticket_pr_ticket && !ticket_ticket_pr)
                continue;
            LinkEdge edge;
            edge.src = a;
            edge.dst = c;
            edge.provenance = Provenance::Transitive;
            edge.location = "via:" + b.system_string() + ":" + b.key_string();
            inferred.push_back(std::move(edge));
        }
    }
    for (auto& edge : inferred)
        graph.add_edge(std::move(edge));
    return graph;
}

} // namespace prszz::links
