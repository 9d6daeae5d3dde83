#include "prszz/lang/profile.hpp"

#include "prszz/support/strings.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>

namespace prszz::lang {

namespace {

LanguageProfile make_braces(std::string name,
                            std::vector<std::string> imports) {
    LanguageProfile profile;
    profile.name = std::move(name);
    profile.line_comment = {"//"};
    profile.block_comment = {{"/*", "*/"}};
    profile.import_keywords = std::move(imports);
    profile.method_style = MethodStyle::Braces;
    return profile;
}

} // namespace

ProfileRegistry ProfileRegistry::builtin() {
    ProfileRegistry registry;

    registry.profiles_["java"] = make_braces("java", {"import"});
    registry.profiles_["javascript"] = make_braces("javascript", {"import"});
    registry.profiles_["go"] = make_braces("go", {"import"});
    registry.profiles_["c-family"] = make_braces("c-family", {"#include"});

    LanguageProfile python;
    python.name = "python";
    python.line_comment = {"#"};
    python.import_keywords = {"import", "from"};
    python.method_style = MethodStyle::Indentation;
    python.method_keywords = {"def", "async def"};
    registry.profiles_["python"] = python;

    auto map_ext = [&](std::initializer_list<const char*> exts, const char* name) {
        for (const char* ext : exts)
            registry.by_extension_[ext] = name;
    };
    map_ext({".java"}, "java");
    map_ext({".js", ".jsx", ".ts", ".tsx", ".mjs"}, "javascript");
    map_ext({".go"}, "go");
    map_ext({".c", ".h", ".cc", ".hh", ".cpp", ".hpp", ".cxx", ".hxx", ".inl"},
            "c-family");
    map_ext({".py", ".pyi"}, "python");
    return registry;
}

void ProfileRegistry::merge_config(const nlohmann::json& config) {
    if (auto profiles = config.find("profiles"); profiles != config.end()) {
        for (const auto& [name, spec] : profiles->items()) {
            LanguageProfile profile;
            profile.name = name;
            for (const auto& token : spec.value("line_comment",
                                                nlohmann::json::array()))
                profile.line_comment.push_back(token.get<std::string>());
            for (const auto& pair : spec.value("block_comment",
                                               nlohmann::json::array()))
                profile.block_comment.emplace_back(pair.at(0).get<std::string>(),
                                                   pair.at(1).get<std::string>());
            for (const auto& token : spec.value("import_keywords",
                                                nlohmann::json::array()))
                profile.import_keywords.push_back(token.get<std::string>());
            profile.method_style =
                spec.value("method_style", "braces") == "indentation"
                    ? MethodStyle::Indentation
                    : MethodStyle::Braces;
            for (const auto& token : spec.value("method_keywords",
                                                nlohmann::json::array()))
                profile.method_keywords.push_back(token.get<std::string>());
            profiles_[name] = std::move(profile);
        }
    }
    if (auto extensions = config.find("extensions"); extensions != config.end())
        for (const auto& [ext, name] : extensions->items())
            by_extension_[ext] = name.get<std::string>();
}

const LanguageProfile* ProfileRegistry::for_path(std::string_view path) const {
    auto dot = path.rfind('.');
    if (dot == std::string_view::npos)
        return nullptr;
    auto it = by_extension_.find(std::string(path.substr(dot)));
    if (it == by_extension_.end())
        return nullptr;
    return by_name(it->second);
}

const LanguageProfile* ProfileRegistry::by_name(std::string_view name) const {
    auto it = profiles_.find(std::string(name));
    return it == profiles_.end() ? nullptr : &it->second;
}

namespace {

bool starts_with_at(std::string_view text, std::size_t pos, std::string_view token) {
    return text.compare(pos, token.size(), token) == 0;
}

} // namespace

std::string normalize_line(std::string_view line, const LanguageProfile& profile) {
    std::string out;
    out.reserve(line.size());

    char in_string = '\0';
    bool escaped = false;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];

        if (in_string != '\0') {
            out.push_back(c);
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == in_string)
                in_string = '\0';
            ++i;
            continue;
        }

        // Comment openers outside strings end or skip the region.
        bool handled = false;
        for (const auto& token : profile.line_comment) {
            if (starts_with_at(line, i, token))
                return out; // rest of line is comment
        }
        for (const auto& [open, close] : profile.block_comment) {
            if (starts_with_at(line, i, open)) {
                auto end = line.find(close, i + open.size());
                if (end == std::string_view::npos)
                    return out; // spills onto the next lines
                i = end + close.size();
                handled = true;
                break;
            }
        }
        if (handled)
            continue;

        if (std::find(profile.string_delims.begin(), profile.string_delims.end(),
                      c) != profile.string_delims.end()) {
            in_string = c;
            out.push_back(c);
            ++i;
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(c)))
            out.push_back(c);
        ++i;
    }
    return out;
}

bool is_comment_only_line(std::string_view line, const LanguageProfile& profile) {
    return strings::trim(line).empty() ? false
                                       : normalize_line(line, profile).empty();
}

bool is_import_line(std::string_view line, const LanguageProfile& profile) {
    auto trimmed = strings::trim(line);
    for (const auto& keyword : profile.import_keywords) {
        if (trimmed.size() < keyword.size())
            continue;
        if (!trimmed.starts_with(keyword))
            continue;
        if (trimmed.size() == keyword.size())
            return true;
        char next = trimmed[keyword.size()];
        if (std::isspace(static_cast<unsigned char>(next)) || next == '(' ||
            next == '"' || next == '<')
            return true;
    }
    return false;
}

bool is_cosmetic_line(const std::optional<std::string>& old_text,
                      const std::optional<std::string>& new_text,
                      const LanguageProfile* profile) {
    if (profile == nullptr)
        return false; // unknown language: keep the line
    if (!old_text && !new_text)
        return false;

    auto one_sided_cosmetic = [&](const std::string& text) {
        if (strings::trim(text).empty())
            return true;
        if (is_comment_only_line(text, *profile))
            return true;
        return is_import_line(text, *profile);
    };

    if (old_text && new_text)
        return normalize_line(*old_text, *profile) ==
               normalize_line(*new_text, *profile);
    return one_sided_cosmetic(old_text ? *old_text : *new_text);
}

namespace {

const std::vector<std::string> kControlKeywords = {
    "if", "else", "for", "while", "switch", "catch", "do",
    "return", "try", "new", "synchronized"};

bool header_is_function_like(const std::string& header) {
    auto open = header.find('(');
    if (open == std::string::npos || header.find(')') == std::string::npos)
        return false;

    // Identifier directly before the parenthesis.
    std::size_t end = open;
    while (end > 0 &&
           std::isspace(static_cast<unsigned char>(header[end - 1])))
        --end;
    std::size_t begin = end;
    while (begin > 0 &&
           (std::isalnum(static_cast<unsigned char>(header[begin - 1])) ||
            header[begin - 1] == '_' || header[begin - 1] == '~'))
        --begin;
    if (begin == end)
        return false;
    std::string name = header.substr(begin, end - begin);

    for (const auto& keyword : kControlKeywords)
        if (name == keyword)
            return false;

    // First word of the header must not be a control keyword either
    // ("if (x) foo()" style one-liners).
    auto first_sep = header.find_first_of(" \t(");
    std::string first =
        header.substr(0, first_sep == std::string::npos ? header.size()
                                                        : first_sep);
    for (const auto& keyword : kControlKeywords)
        if (first == keyword)
            return false;
    return true;
}

std::optional<MethodSpan> braces_span(std::string_view content, int line,
                                      const LanguageProfile& profile) {
    struct Block {
        int header_start_line;
        std::string header;
        bool is_method;
    };

    auto lines = strings::split_lines(content);
    std::vector<Block> stack;
    std::vector<MethodSpan> covering;

    char in_string = '\0';
    bool escaped = false;
    int block_comment_depth = -1; // index of active block pair or -1
    std::string pending_header;
    bool header_started = false;
    int pending_start_line = 1;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        std::string_view text = lines[li];
        int line_no = static_cast<int>(li) + 1;
        bool in_line_comment = false;

        for (std::size_t i = 0; i < text.size();) {
            char c = text[i];

            if (block_comment_depth >= 0) {
                const auto& close =
                    profile.block_comment[static_cast<std::size_t>(
                                              block_comment_depth)]
                        .second;
                if (starts_with_at(text, i, close)) {
                    block_comment_depth = -1;
                    i += close.size();
                } else {
                    ++i;
                }
                continue;
            }
            if (in_line_comment)
                break;
            if (in_string != '\0') {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == in_string)
                    in_string = '\0';
                ++i;
                continue;
            }

            bool token_handled = false;
            for (const auto& token : profile.line_comment) {
                if (starts_with_at(text, i, token)) {
                    in_line_comment = true;
                    token_handled = true;
                    break;
                }
            }
            if (token_handled)
                continue;
            for (std::size_t b = 0; b < profile.block_comment.size(); ++b) {
                if (starts_with_at(text, i, profile.block_comment[b].first)) {
                    block_comment_depth = static_cast<int>(b);
                    i += profile.block_comment[b].first.size();
                    token_handled = true;
                    break;
                }
            }
            if (token_handled)
                continue;

            if (std::find(profile.string_delims.begin(),
                          profile.string_delims.end(),
                          c) != profile.string_delims.end()) {
                in_string = c;
                ++i;
                continue;
            }

            if (c == '{') {
                auto trimmed = strings::trim(pending_header);
                int start = header_started ? pending_start_line : line_no;
                stack.push_back({start, std::string(trimmed),
                                 header_is_function_like(std::string(trimmed))});
                pending_header.clear();
                header_started = false;
                ++i;
                continue;
            }
            if (c == '}') {
                if (!stack.empty()) {
                    Block block = stack.back();
                    stack.pop_back();
                    if (block.is_method && block.header_start_line <= line &&
                        line <= line_no) {
                        MethodSpan span;
                        span.start_line = block.header_start_line;
                        span.end_line = line_no;
                        span.header = strings::normalized_first_line(block.header);
                        covering.push_back(std::move(span));
                    }
                }
                pending_header.clear();
                header_started = false;
                ++i;
                continue;
            }
            if (c == ';') {
                pending_header.clear();
                header_started = false;
                ++i;
                continue;
            }

            if (!header_started && !std::isspace(static_cast<unsigned char>(c))) {
                header_started = true;
                pending_start_line = line_no;
            }
            pending_header.push_back(c);
            ++i;
        }
        pending_header.push_back(' ');
    }

    if (covering.empty())
        return std::nullopt;
    // Innermost span: maximal start line (ties: minimal end).
    auto best = covering.front();
    for (const auto& span : covering) {
        if (span.start_line > best.start_line ||
            (span.start_line == best.start_line && span.end_line < best.end_line))
            best = span;
    }
    return best;
}

int indent_of(std::string_view line) {
    int indent = 0;
    for (char c : line) {
        if (c == ' ')
            ++indent;
        else if (c == '\t')
            indent += 8;
        else
            break;
    }
    return indent;
}

std::optional<MethodSpan> indentation_span(std::string_view content, int line,
                                           const LanguageProfile& profile) {
    auto lines = strings::split_lines(content);
    std::optional<MethodSpan> innermost;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        int def_line = static_cast<int>(li) + 1;
        if (def_line > line)
            break;
        auto trimmed = strings::trim(lines[li]);
        bool is_def = false;
        for (const auto& keyword : profile.method_keywords) {
            if (trimmed.starts_with(keyword) &&
                (trimmed.size() == keyword.size() ||
                 std::isspace(static_cast<unsigned char>(trimmed[keyword.size()]))))
                is_def = true;
        }
        if (!is_def)
            continue;

        int def_indent = indent_of(lines[li]);
        // Block ends before the next non-blank line at indent <= def_indent.
        int end_line = static_cast<int>(lines.size());
        for (std::size_t j = li + 1; j < lines.size(); ++j) {
            auto body = strings::trim(lines[j]);
            if (body.empty())
                continue;
            if (indent_of(lines[j]) <= def_indent) {
                end_line = static_cast<int>(j);
                break;
            }
        }
        // Trailing blank lines are not part of the block.
        while (end_line > def_line &&
               strings::trim(lines[static_cast<std::size_t>(end_line - 1)])
                   .empty())
            --end_line;

        if (def_line <= line && line <= end_line) {
            if (!innermost || def_line > innermost->start_line) {
                MethodSpan span;
                span.start_line = def_line;
                span.end_line = end_line;
                span.header = strings::normalized_first_line(trimmed);
                innermost = span;
            }
        }
    }
    return innermost;
}

} // namespace

std::optional<MethodSpan> enclosing_method_span(std::string_view content,
                                                int line,
                                                const LanguageProfile& profile) {
    if (profile.method_style == MethodStyle::Braces)
        return braces_span(content, line, profile);
    return indentation_span(content, line, profile);
}

} // namespace prszz::lang
