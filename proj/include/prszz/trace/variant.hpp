#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace prszz::trace {

enum class VariantName { B, AG, MA, PR, L, R, PR_SELECT };

enum class SelectionStrategy { Largest, Recent, PrSelect };

// A variant is a named flag set over the shared tracing pipeline.
struct VariantId {
    VariantName name = VariantName::B;
    bool cosmetic_filter = false;
    bool meta_filter = false;
    // Blame is implemented as exact per-line mapping, so this flag has no
    // off-switch; it is kept so configs can state it explicitly.
    bool line_mapping = true;
    bool method_trace = false;
    bool f1 = false;
    bool f2 = false;
    bool f3 = false;
    bool s1 = false;
    bool s2 = false;
    bool s3 = false;
    bool size_threshold = false;
    bool temporal = true; // reject commits after the bug report
    std::optional<SelectionStrategy> selection;

    static VariantId make(VariantName name);
    static std::optional<VariantId> parse(std::string_view text);
    std::string to_string() const;
};

} // namespace prszz::trace
