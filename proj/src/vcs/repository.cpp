#include "prszz/vcs/repository.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <unordered_set>

namespace prszz::vcs {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return data;
}

bool looks_like_git_dir(const fs::path& dir) {
    std::error_code ec;
    return fs::is_directory(dir / "objects", ec) && fs::exists(dir / "HEAD", ec);
}

} // namespace

Repository::Repository(fs::path git_dir) : git_dir_(std::move(git_dir)) {
    store_ = std::make_shared<ObjectStore>(git_dir_ / "objects");
    caches_ = std::make_shared<CacheState>();
}

Repository Repository::open(const fs::path& path) {
    std::error_code ec;
    if (!fs::exists(path, ec))
        throw NotARepository("path does not exist: " + path.string());

    fs::path dot_git = path / ".git";
    if (fs::is_directory(dot_git, ec) && looks_like_git_dir(dot_git))
        return Repository(dot_git);

    // gitfile indirection ("gitdir: <path>")
    if (fs::is_regular_file(dot_git, ec)) {
        if (auto content = read_text_file(dot_git)) {
            auto line = strings::trim(*content);
            if (line.starts_with("gitdir:")) {
                fs::path target(strings::trim(line.substr(7)));
                if (target.is_relative())
                    target = path / target;
                if (looks_like_git_dir(target))
                    return Repository(target);
            }
        }
    }

    if (looks_like_git_dir(path))
        return Repository(path); // bare

    throw NotARepository("no git object database under " + path.string());
}

bool Repository::has_object(const ObjectId& id) const {
    return store_->contains(id);
}

bool Repository::has_commit(const ObjectId& id) const {
    auto obj = store_->try_read(id);
    return obj && (*obj)->type == ObjectType::Commit;
}

std::shared_ptr<const Commit> Repository::commit(const ObjectId& id) const {
    {
        std::lock_guard lock(caches_->mutex);
        auto it = caches_->commits.find(id);
        if (it != caches_->commits.end())
            return it->second;
    }
    auto obj = store_->read(id);
    if (obj->type != ObjectType::Commit)
        throw UnknownCommit("object is not a commit: " + id.hex());
    auto parsed = std::make_shared<const Commit>(parse_commit(id, obj->data));
    std::lock_guard lock(caches_->mutex);
    caches_->commits.emplace(id, parsed);
    return parsed;
}

std::vector<TreeEntry> Repository::tree_entries(const ObjectId& tree_id) const {
    auto obj = store_->read(tree_id);
    if (obj->type != ObjectType::Tree)
        throw CorruptObjectDatabase("object is not a tree: " + tree_id.hex());
    return parse_tree(obj->data);
}

std::string Repository::blob(const ObjectId& id) const {
    auto obj = store_->read(id);
    if (obj->type != ObjectType::Blob)
        throw CorruptObjectDatabase("object is not a blob: " + id.hex());
    return obj->data;
}

std::optional<ObjectId> Repository::resolve_ref(const std::string& name) const {
    if (auto content = read_text_file(git_dir_ / name)) {
        auto line = strings::trim(*content);
        if (line.starts_with("ref: "))
            return resolve_ref(std::string(strings::trim(line.substr(5))));
        if (auto id = ObjectId::parse(line))
            return id;
        return std::nullopt;
    }
    // packed-refs fallback
    if (auto packed = read_text_file(git_dir_ / "packed-refs")) {
        for (auto line : strings::split_lines(*packed)) {
            line = strings::trim(line);
            if (line.empty() || line.front() == '#' || line.front() == '^')
                continue;
            auto sp = line.find(' ');
            if (sp == std::string_view::npos)
                continue;
            if (strings::trim(line.substr(sp + 1)) == name)
                return ObjectId::parse(line.substr(0, sp));
        }
    }
    return std::nullopt;
}

std::optional<ObjectId> Repository::head() const {
    auto content = read_text_file(git_dir_ / "HEAD");
    if (!content)
        return std::nullopt;
    auto line = strings::trim(*content);
    if (line.starts_with("ref: "))
        return resolve_ref(std::string(strings::trim(line.substr(5))));
    return ObjectId::parse(line);
}

std::vector<std::pair<std::string, ObjectId>> Repository::branch_refs() const {
    std::vector<std::pair<std::string, ObjectId>> refs;

    fs::path heads = git_dir_ / "refs" / "heads";
    std::error_code ec;
    if (fs::is_directory(heads, ec)) {
        for (const auto& entry : fs::recursive_directory_iterator(heads)) {
            if (!entry.is_regular_file())
                continue;
            auto rel = fs::relative(entry.path(), git_dir_, ec).generic_string();
            if (auto id = resolve_ref(rel))
                refs.emplace_back(rel, *id);
        }
    }

    if (auto packed = read_text_file(git_dir_ / "packed-refs")) {
        for (auto line : strings::split_lines(*packed)) {
            line = strings::trim(line);
            if (line.empty() || line.front() == '#' || line.front() == '^')
                continue;
            auto sp = line.find(' ');
            if (sp == std::string_view::npos)
                continue;
            auto name = std::string(strings::trim(line.substr(sp + 1)));
            if (!name.starts_with("refs/heads/"))
                continue;
            if (std::none_of(refs.begin(), refs.end(),
                             [&](const auto& r) { return r.first == name; })) {
                if (auto id = ObjectId::parse(line.substr(0, sp)))
                    refs.emplace_back(name, *id);
            }
        }
    }

    std::sort(refs.begin(), refs.end());
    return refs;
}

std::vector<ObjectId> Repository::head_commits() const {
    std::vector<ObjectId> out;
    std::set<ObjectId> seen;
    if (auto h = head()) {
        if (has_commit(*h)) {
            out.push_back(*h);
            seen.insert(*h);
        }
    }
    for (const auto& [name, id] : branch_refs()) {
        if (seen.insert(id).second && has_commit(id))
            out.push_back(id);
    }
    return out;
}

std::optional<Repository::PathEntry>
Repository::entry_at(const ObjectId& commit_id, std::string_view path) const {
    auto c = commit(commit_id);
    ObjectId tree = c->tree;
    auto components = strings::split(path, '/');
    for (std::size_t i = 0; i < components.size(); ++i) {
        auto entries = tree_entries(tree);
        auto it = std::find_if(entries.begin(), entries.end(), [&](const TreeEntry& e) {
            return e.name == components[i];
        });
        if (it == entries.end())
            return std::nullopt;
        if (i + 1 == components.size()) {
            if (it->is_tree())
                return std::nullopt;
            return PathEntry{it->mode, it->id};
        }
        if (!it->is_tree())
            return std::nullopt;
        tree = it->id;
    }
    return std::nullopt;
}

std::string Repository::file_at(const ObjectId& commit_id,
                                std::string_view path) const {
    auto entry = entry_at(commit_id, path);
    if (!entry)
        throw PathNotPresent(std::string(path) + " not present at " +
                             commit_id.hex());
    return blob(entry->id);
}

Repository::FlatTree Repository::flatten_tree(const ObjectId& tree_id,
                                              const std::string& prefix) const {
    FlatTree out;
    for (const auto& entry : tree_entries(tree_id)) {
        std::string path = prefix.empty() ? entry.name : prefix + "/" + entry.name;
        if (entry.is_tree()) {
            auto sub = flatten_tree(entry.id, path);
            out.insert(sub.begin(), sub.end());
        } else if (entry.mode != filemode::gitlink) {
            out.emplace(std::move(path), PathEntry{entry.mode, entry.id});
        }
    }
    return out;
}

std::shared_ptr<const Repository::FlatTree>
Repository::flatten_commit(const ObjectId& commit_id) const {
    {
        std::lock_guard lock(caches_->mutex);
        auto it = caches_->flats.find(commit_id);
        if (it != caches_->flats.end())
            return it->second;
    }
    auto c = commit(commit_id);
    auto flat = std::make_shared<const FlatTree>(flatten_tree(c->tree, ""));
    std::lock_guard lock(caches_->mutex);
    caches_->flats.emplace(commit_id, flat);
    return flat;
}

std::vector<ObjectId> Repository::all_commits() const {
    std::vector<ObjectId> out;
    std::unordered_set<ObjectId, ObjectIdHash> seen;
    std::deque<ObjectId> frontier;
    for (const auto& h : head_commits())
        if (seen.insert(h).second)
            frontier.push_back(h);

    while (!frontier.empty()) {
        ObjectId id = frontier.front();
        frontier.pop_front();
        out.push_back(id);
        for (const auto& parent : commit(id)->parents)
            if (seen.insert(parent).second)
                frontier.push_back(parent);
    }

    std::sort(out.begin(), out.end(), [&](const ObjectId& a, const ObjectId& b) {
        auto ca = commit(a);
        auto cb = commit(b);
        if (ca->commit_time() != cb->commit_time())
            return ca->commit_time() > cb->commit_time();
        return a < b;
    });
    return out;
}

std::vector<ObjectId> Repository::first_parent_chain(const ObjectId& from) const {
    std::vector<ObjectId> chain;
    ObjectId cur = from;
    while (true) {
        chain.push_back(cur);
        auto c = commit(cur);
        if (c->parents.empty())
            break;
        cur = c->parents.front();
    }
    return chain;
}

bool Repository::is_ancestor(const ObjectId& ancestor,
                             const ObjectId& descendant) const {
    if (ancestor == descendant)
        return true;
    std::unordered_set<ObjectId, ObjectIdHash> seen;
    std::deque<ObjectId> frontier{descendant};
    seen.insert(descendant);
    while (!frontier.empty()) {
        ObjectId id = frontier.front();
        frontier.pop_front();
        for (const auto& parent : commit(id)->parents) {
            if (parent == ancestor)
                return true;
            if (seen.insert(parent).second)
                frontier.push_back(parent);
        }
    }
    return false;
}

} // namespace prszz::vcs
