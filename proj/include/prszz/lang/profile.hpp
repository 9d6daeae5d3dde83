#pragma once

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prszz::lang {

enum class MethodStyle { Braces, Indentation };

// Table-driven lexing profile: enough structure awareness for comment,
// import and method-span detection without a full grammar.
struct LanguageProfile {
    std::string name;
    std::vector<std::string> line_comment;
    std::vector<std::pair<std::string, std::string>> block_comment;
    std::vector<std::string> import_keywords;
    MethodStyle method_style = MethodStyle::Braces;
    std::vector<char> string_delims = {'"', '\''};
    // Indentation style: keywords that open a method definition.
    std::vector<std::string> method_keywords = {"def"};
};

class ProfileRegistry {
public:
    // Java, Python, JavaScript/TypeScript, Go and the C family.
    static ProfileRegistry builtin();

    // Config schema: {"profiles": {name: {...}}, "extensions": {".ext": name}}.
    // Entries extend/override the builtin set.
    void merge_config(const nlohmann::json& config);

    const LanguageProfile* for_path(std::string_view path) const;
    const LanguageProfile* by_name(std::string_view name) const;

private:
    std::map<std::string, LanguageProfile> profiles_;
    std::map<std::string, std::string> by_extension_;
};

// Strips comments from one line (string-aware; block comments only when they
// close on the same line) and removes whitespace outside string literals.
std::string normalize_line(std::string_view line, const LanguageProfile& profile);

bool is_comment_only_line(std::string_view line, const LanguageProfile& profile);
bool is_import_line(std::string_view line, const LanguageProfile& profile);

// Whitespace/comment/import-only change detection. Absent sides model pure
// additions/deletions. A null profile (unknown language) is conservative:
// nothing is cosmetic.
bool is_cosmetic_line(const std::optional<std::string>& old_text,
                      const std::optional<std::string>& new_text,
                      const LanguageProfile* profile);

struct MethodSpan {
    int start_line = 0; // 1-based, inclusive; the signature line
    int end_line = 0;   // inclusive
    std::string header; // normalized signature text
};

// Innermost method/function span containing `line`, or nullopt (whole-file
// sentinel: no enclosing method).
std::optional<MethodSpan> enclosing_method_span(std::string_view content,
                                                int line,
                                                const LanguageProfile& profile);

} // namespace prszz::lang
