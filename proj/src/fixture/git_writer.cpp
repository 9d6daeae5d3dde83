#include "prszz/fixture/git_writer.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/hashing.hpp"
#include "prszz/support/zstream.hpp"

#include <algorithm>
#include <fstream>

namespace prszz::fixture {

namespace fs = std::filesystem;
using vcs::ObjectId;

namespace gitobj {

namespace {

std::string with_header(std::string_view type, std::string_view payload) {
    std::string out;
    out.reserve(type.size() + 16 + payload.size());
    out.append(type);
    out.push_back(' ');
    out.append(std::to_string(payload.size()));
    out.push_back('\0');
    out.append(payload);
    return out;
}

std::string format_signature(const vcs::Signature& sig) {
    return sig.name + " <" + sig.email + "> " + std::to_string(sig.time) + " " +
           (sig.tz.empty() ? "+0000" : sig.tz);
}

} // namespace

std::string blob_object(std::string_view content) {
    return with_header("blob", content);
}

std::string commit_object(const CommitSpec& spec) {
    std::string payload;
    payload += "tree " + spec.tree.hex() + "\n";
    for (const auto& parent : spec.parents)
        payload += "parent " + parent.hex() + "\n";
    payload += "author " + format_signature(spec.author) + "\n";
    payload += "committer " + format_signature(spec.committer) + "\n";
    payload += "\n";
    payload += spec.message;
    return with_header("commit", payload);
}

ObjectId id_of(std::string_view object_bytes) {
    auto digest = hashing::sha1(object_bytes);
    return ObjectId::from_raw(digest.data());
}

} // namespace gitobj

namespace {

struct TreeNode {
    std::map<std::string, TreeNode> dirs;
    std::map<std::string, const FileState*> files;
};

TreeNode build_tree_nodes(const FileTree& files) {
    TreeNode root;
    for (const auto& [path, state] : files) {
        TreeNode* node = &root;
        std::size_t start = 0;
        while (true) {
            auto pos = path.find('/', start);
            if (pos == std::string::npos) {
                node->files.emplace(path.substr(start), &state);
                break;
            }
            node = &node->dirs[path.substr(start, pos - start)];
            start = pos + 1;
        }
    }
    return root;
}

struct RawTreeEntry {
    std::uint32_t mode;
    std::string name;
    ObjectId id;
};

std::string serialize_tree(std::vector<RawTreeEntry> entries) {
    // git sorts tree entries as if directory names carried a trailing '/'.
    std::sort(entries.begin(), entries.end(),
              [](const RawTreeEntry& a, const RawTreeEntry& b) {
                  std::string ka = a.name;
                  std::string kb = b.name;
                  if (a.mode == vcs::filemode::tree)
                      ka += '/';
                  if (b.mode == vcs::filemode::tree)
                      kb += '/';
                  return ka < kb;
              });
    std::string payload;
    for (const auto& entry : entries) {
        char mode_buf[8];
        std::snprintf(mode_buf, sizeof(mode_buf), "%o", entry.mode);
        payload.append(mode_buf);
        payload.push_back(' ');
        payload.append(entry.name);
        payload.push_back('\0');
        payload.append(reinterpret_cast<const char*>(entry.id.raw().data()), 20);
    }
    return payload;
}

// Serializes blobs/trees bottom-up; `sink` persists each object (no-op when
// only hashing).
template <typename Sink>
ObjectId emit_tree(const TreeNode& node, Sink&& sink) {
    std::vector<RawTreeEntry> entries;
    for (const auto& [name, child] : node.dirs)
        entries.push_back({vcs::filemode::tree, name, emit_tree(child, sink)});
    for (const auto& [name, state] : node.files) {
        std::string obj = gitobj::blob_object(state->content);
        ObjectId id = gitobj::id_of(obj);
        sink(obj, id);
        entries.push_back({state->executable ? vcs::filemode::executable
                                             : vcs::filemode::regular,
                           name, id});
    }
    std::string payload = serialize_tree(std::move(entries));
    std::string tree_bytes = "tree " + std::to_string(payload.size());
    tree_bytes.push_back('\0');
    tree_bytes += payload;
    ObjectId id = gitobj::id_of(tree_bytes);
    sink(tree_bytes, id);
    return id;
}

void write_text(const fs::path& path, std::string_view content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << content;
}

} // namespace

GitRepoWriter::GitRepoWriter(fs::path git_dir) : git_dir_(std::move(git_dir)) {}

GitRepoWriter GitRepoWriter::init(const fs::path& dir,
                                  const std::string& default_branch, bool bare) {
    fs::path git_dir = bare ? dir : dir / ".git";
    fs::create_directories(git_dir / "objects" / "info");
    fs::create_directories(git_dir / "objects" / "pack");
    fs::create_directories(git_dir / "refs" / "heads");
    fs::create_directories(git_dir / "refs" / "tags");
    write_text(git_dir / "HEAD", "ref: refs/heads/" + default_branch + "\n");
    write_text(git_dir / "config",
               std::string("[core]\n\trepositoryformatversion = 0\n"
                           "\tfilemode = true\n\tbare = ") +
                   (bare ? "true" : "false") + "\n");
    return GitRepoWriter(git_dir);
}

ObjectId GitRepoWriter::store_object(std::string_view object_bytes) {
    ObjectId id = gitobj::id_of(object_bytes);
    std::string hex = id.hex();
    fs::path path = git_dir_ / "objects" / hex.substr(0, 2) / hex.substr(2);
    if (!fs::exists(path)) {
        fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write object " + path.string());
        std::string compressed = zstream::deflate(object_bytes);
        out.write(compressed.data(),
                  static_cast<std::streamsize>(compressed.size()));
    }
    return id;
}

ObjectId GitRepoWriter::write_blob(std::string_view content) {
    return store_object(gitobj::blob_object(content));
}

ObjectId GitRepoWriter::write_tree(const FileTree& files) {
    auto root = build_tree_nodes(files);
    return emit_tree(root, [this](std::string_view bytes, const ObjectId&) {
        store_object(bytes);
    });
}

ObjectId GitRepoWriter::write_commit(const CommitSpec& spec) {
    return store_object(gitobj::commit_object(spec));
}

ObjectId GitRepoWriter::hash_tree(const FileTree& files) {
    auto root = build_tree_nodes(files);
    return emit_tree(root, [](std::string_view, const ObjectId&) {});
}

ObjectId GitRepoWriter::hash_commit(const CommitSpec& spec) {
    return gitobj::id_of(gitobj::commit_object(spec));
}

void GitRepoWriter::update_ref(const std::string& name, const ObjectId& id) {
    write_text(git_dir_ / name, id.hex() + "\n");
}

void GitRepoWriter::delete_ref(const std::string& name) {
    std::error_code ec;
    fs::remove(git_dir_ / name, ec);
}

void GitRepoWriter::set_head(const std::string& branch) {
    write_text(git_dir_ / "HEAD", "ref: refs/heads/" + branch + "\n");
}

} // namespace prszz::fixture
