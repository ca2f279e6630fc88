#pragma once

#include <set>
#include <string>
#include <vector>

namespace sentinel {

enum class ItemModality { text, image_descriptor };

/// Maps free text onto a canonical answer: the first rule with any matching
/// phrase wins. Phrases are word sequences where `*` spans one to six words.
struct CanonicalRule {
    std::string answer;
    std::vector<std::string> any_of;
    friend bool operator==(const CanonicalRule&, const CanonicalRule&) = default;
};

/// A comprehension check that exploits prototypical-response bias.
struct CheckItem {
    std::string item_id;
    std::string prompt_text;
    ItemModality modality = ItemModality::text;
    std::string fallback_description;  // text stand-in for image_descriptor items
    std::set<std::string> human_expected;
    std::set<std::string> llm_prototypical;
    std::string canonicalizer_id = "keyword_rules";
    std::vector<CanonicalRule> rules;

    friend bool operator==(const CheckItem&, const CheckItem&) = default;
};

}  // namespace sentinel
