#include "prszz/vcs/objects.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/strings.hpp"

#include <charconv>

namespace prszz::vcs {

ObjectType parse_object_type(std::string_view name) {
    if (name == "commit")
        return ObjectType::Commit;
    if (name == "tree")
        return ObjectType::Tree;
    if (name == "blob")
        return ObjectType::Blob;
    if (name == "tag")
        return ObjectType::Tag;
    throw CorruptObjectDatabase("unknown object type '" + std::string(name) + "'");
}

std::string_view object_type_name(ObjectType type) {
    switch (type) {
    case ObjectType::Commit: return "commit";
    case ObjectType::Tree: return "tree";
    case ObjectType::Blob: return "blob";
    case ObjectType::Tag: return "tag";
    }
    return "unknown";
}

namespace {

// "Name <email> 1600000000 +0000"
Signature parse_signature(std::string_view text) {
    Signature sig;
    auto lt = text.find('<');
    auto gt = text.find('>', lt == std::string_view::npos ? 0 : lt);
    if (lt == std::string_view::npos || gt == std::string_view::npos)
        throw CorruptObjectDatabase("malformed signature line");
    sig.name = std::string(strings::trim(text.substr(0, lt)));
    sig.email = std::string(text.substr(lt + 1, gt - lt - 1));
    auto rest = strings::trim(text.substr(gt + 1));
    auto sp = rest.find(' ');
    auto ts = rest.substr(0, sp);
    std::from_chars(ts.data(), ts.data() + ts.size(), sig.time);
    if (sp != std::string_view::npos)
        sig.tz = std::string(strings::trim(rest.substr(sp + 1)));
    return sig;
}

ObjectId parse_id_field(std::string_view value, const char* field) {
    auto id = ObjectId::parse(strings::trim(value));
    if (!id)
        throw CorruptObjectDatabase(std::string("malformed ") + field + " field");
    return *id;
}

} // namespace

Commit parse_commit(const ObjectId& id, std::string_view data) {
    Commit commit;
    commit.id = id;

    std::size_t pos = 0;
    while (pos < data.size()) {
        auto eol = data.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = data.size();
        std::string_view line = data.substr(pos, eol - pos);
        pos = eol + 1;

        if (line.empty())
            break; // header/message separator

        // Continuation lines (gpgsig etc.) start with a space.
        if (line.front() == ' ')
            continue;

        auto sp = line.find(' ');
        std::string_view key = line.substr(0, sp);
        std::string_view value =
            sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);

        if (key == "tree")
            commit.tree = parse_id_field(value, "tree");
        else if (key == "parent")
            commit.parents.push_back(parse_id_field(value, "parent"));
        else if (key == "author")
            commit.author = parse_signature(value);
        else if (key == "committer")
            commit.committer = parse_signature(value);
        // other headers (gpgsig, encoding, mergetag) are skipped
    }

    if (pos < data.size())
        commit.message = std::string(data.substr(pos));
    return commit;
}

std::vector<TreeEntry> parse_tree(std::string_view data) {
    std::vector<TreeEntry> entries;
    std::size_t pos = 0;
    while (pos < data.size()) {
        auto sp = data.find(' ', pos);
        auto nul = data.find('\0', sp == std::string_view::npos ? pos : sp);
        if (sp == std::string_view::npos || nul == std::string_view::npos ||
            nul + 21 > data.size())
            throw CorruptObjectDatabase("malformed tree entry");

        TreeEntry entry;
        auto mode_str = data.substr(pos, sp - pos);
        std::uint32_t mode = 0;
        for (char c : mode_str)
            mode = mode * 8 + static_cast<std::uint32_t>(c - '0');
        entry.mode = mode;
        entry.name = std::string(data.substr(sp + 1, nul - sp - 1));
        entry.id = ObjectId::from_raw(
            reinterpret_cast<const unsigned char*>(data.data() + nul + 1));
        entries.push_back(std::move(entry));
        pos = nul + 21;
    }
    return entries;
}

} // namespace prszz::vcs
