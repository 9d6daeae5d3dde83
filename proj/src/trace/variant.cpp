#include "prszz/trace/variant.hpp"

namespace prszz::trace {

VariantId VariantId::make(VariantName name) {
    VariantId variant;
    variant.name = name;
    switch (name) {
    case VariantName::B:
        break; // direct-parent diff, temporal rejection only
    case VariantName::AG:
        variant.cosmetic_filter = true;
        break;
    case VariantName::MA:
        variant.cosmetic_filter = true;
        variant.meta_filter = true;
        break;
    case VariantName::L:
        variant.cosmetic_filter = true;
        variant.selection = SelectionStrategy::Largest;
        break;
    case VariantName::R:
        variant.cosmetic_filter = true;
        variant.selection = SelectionStrategy::Recent;
        break;
    case VariantName::PR:
        variant.cosmetic_filter = true;
        variant.meta_filter = true;
        variant.method_trace = true;
        variant.f1 = variant.f2 = variant.f3 = true;
        variant.s1 = variant.s2 = variant.s3 = true;
        variant.size_threshold = true;
        break;
    case VariantName::PR_SELECT:
        variant = make(VariantName::PR);
        variant.name = VariantName::PR_SELECT;
        variant.selection = SelectionStrategy::PrSelect;
        break;
    }
    return variant;
}

std::optional<VariantId> VariantId::parse(std::string_view text) {
    if (text == "B")
        return make(VariantName::B);
    if (text == "AG")
        return make(VariantName::AG);
    if (text == "MA")
        return make(VariantName::MA);
    if (text == "PR")
        return make(VariantName::PR);
    if (text == "L")
        return make(VariantName::L);
    if (text == "R")
        return make(VariantName::R);
    if (text == "PR_SELECT")
        return make(VariantName::PR_SELECT);
    return std::nullopt;
}

std::string VariantId::to_string() const {
    switch (name) {
    case VariantName::B: return "B";
    case VariantName::AG: return "AG";
    case VariantName::MA: return "MA";
    case VariantName::PR: return "PR";
    case VariantName::L: return "L";
    case VariantName::R: return "R";
    case VariantName::PR_SELECT: return "PR_SELECT";
    }
    return "B";
}

} // namespace prszz::trace
