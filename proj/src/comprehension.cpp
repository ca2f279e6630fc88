#include "sentinel/comprehension.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "sentinel/phrase_match.hpp"
#include "sentinel/unicode.hpp"

namespace sentinel::comprehension {

using nlohmann::json;

std::string_view to_string(CheckOutcome o) {
    switch (o) {
        case CheckOutcome::human_consistent: return "human_consistent";
        case CheckOutcome::llm_prototypical: return "llm_prototypical";
        case CheckOutcome::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

namespace {

bool known_canonicalizer(std::string_view id) { return id == "keyword_rules" || id == "exact"; }

}  // namespace

void validate_item(const CheckItem& item) {
    if (item.item_id.empty()) throw ConfigError("check item without item_id");
    if (item.human_expected.empty() || item.llm_prototypical.empty()) {
        throw ConfigError("check item " + item.item_id + ": both answer sets must be non-empty");
    }
    for (const auto& a : item.human_expected) {
        if (item.llm_prototypical.count(a) != 0) {
            throw ConfigError("check item " + item.item_id + ": answer '" + a +
                              "' is both human-expected and prototypical");
        }
    }
    if (!known_canonicalizer(item.canonicalizer_id)) {
        throw ConfigError("check item " + item.item_id + ": unknown canonicalizer '" +
                          item.canonicalizer_id + "'");
    }
    for (const auto& r : item.rules) {
        if (item.human_expected.count(r.answer) == 0 && item.llm_prototypical.count(r.answer) == 0) {
            throw ConfigError("check item " + item.item_id + ": rule answer '" + r.answer +
                              "' is in neither answer set");
        }
    }
}

std::optional<std::string> canonicalize(const CheckItem& item, std::string_view answer_text) {
    const std::string norm = text::normalize_text(answer_text);
    if (item.canonicalizer_id == "exact") {
        if (item.human_expected.count(norm) || item.llm_prototypical.count(norm)) return norm;
        return std::nullopt;
    }
    if (item.canonicalizer_id != "keyword_rules") {
        throw ConfigError("unknown canonicalizer '" + item.canonicalizer_id + "'");
    }
    const auto tokens = text::tokenize(norm);
    for (const auto& rule : item.rules) {
        for (const auto& phrase : rule.any_of) {
            if (!text::PhrasePattern(phrase).find_all(tokens).empty()) return rule.answer;
        }
    }
    return std::nullopt;
}

CheckOutcome evaluate_response(const CheckItem& item, std::string_view answer_text) {
    const auto canonical = canonicalize(item, answer_text);
    if (!canonical) return CheckOutcome::indeterminate;
    if (item.human_expected.count(*canonical)) return CheckOutcome::human_consistent;
    if (item.llm_prototypical.count(*canonical)) return CheckOutcome::llm_prototypical;
    return CheckOutcome::indeterminate;
}

std::optional<DetectionSignal> aggregate_check_signal(std::span<const CheckOutcome> results,
                                                      const ComprehensionPolicy& policy,
                                                      const std::string& session_id) {
    const auto n = static_cast<int>(results.size());
    if (n == 0) return std::nullopt;
    const auto proto = static_cast<int>(
        std::count(results.begin(), results.end(), CheckOutcome::llm_prototypical));
    Evidence ev{{"prototypical", std::to_string(proto)}, {"evaluated", std::to_string(n)}};
    if (n == 1 && proto == 1 && policy.allow_single_item) {
        return DetectionSignal{"comprehension.prototypical", session_id, Unit(0.5),
                               VariantHint::full_delegation, std::move(ev)};
    }
    if (proto < std::max(1, policy.min_prototypical)) return std::nullopt;
    return DetectionSignal{"comprehension.prototypical", session_id,
                           Unit::clamped(static_cast<double>(proto) / n),
                           VariantHint::full_delegation, std::move(ev)};
}

std::vector<CheckItem> builtin_items() {
    std::vector<CheckItem> items;

    CheckItem tom;
    tom.item_id = "tom_transparent_jar";
    tom.prompt_text =
        "A jar is full of buttons. There are no sweets in the jar. The jar is made of clear "
        "glass, so anyone holding it can see exactly what is inside. The label on the jar says "
        "\"sweets\". Robin has never seen this jar before. Robin picks the jar up, looks at it "
        "and reads the label. What does Robin believe is inside the jar?";
    tom.modality = ItemModality::text;
    tom.human_expected = {"buttons"};
    tom.llm_prototypical = {"sweets"};
    tom.rules = {{"buttons", {"buttons", "button"}},
                 {"sweets", {"sweets", "sweet", "candy", "candies"}}};
    items.push_back(std::move(tom));

    CheckItem ml;
    ml.item_id = "muller_lyer_modified";
    ml.prompt_text =
        "Look at the two horizontal lines in the image. Are they the same length? If not, "
        "which one is shorter?";
    ml.modality = ItemModality::image_descriptor;
    ml.fallback_description =
        "Two horizontal lines with arrowhead fins in the classic Mueller-Lyer arrangement. "
        "The bottom line has been drawn clearly shorter than the top line.";
    ml.human_expected = {"bottom_shorter"};
    ml.llm_prototypical = {"same_length"};
    ml.rules = {{"bottom_shorter",
                 {"bottom * shorter", "bottom shorter", "bottom * smaller", "lower * shorter",
                  "lower * smaller", "second * shorter", "top * longer", "upper * longer"}},
                {"same_length",
                 {"same length", "same size", "equal length", "equal in length", "equally long",
                  "identical", "same"}}};
    items.push_back(std::move(ml));

    CheckItem eb;
    eb.item_id = "ebbinghaus_modified";
    eb.prompt_text =
        "Compare the two orange circles in the image. Are they the same size? If not, which "
        "one is smaller?";
    eb.modality = ItemModality::image_descriptor;
    eb.fallback_description =
        "Two orange circles, each ringed by grey circles in the classic Ebbinghaus "
        "arrangement. The left orange circle has been drawn clearly smaller than the right one.";
    eb.human_expected = {"left_smaller"};
    eb.llm_prototypical = {"same_size"};
    eb.rules = {{"left_smaller",
                 {"left * smaller", "left smaller", "left * tinier", "right * bigger",
                  "right * larger", "left * small"}},
                {"same_size", {"same size", "equal size", "equal in size", "identical", "same"}}};
    items.push_back(std::move(eb));

    for (const auto& i : items) validate_item(i);
    return items;
}

namespace {

json item_to_json(const CheckItem& i) {
    json rules = json::array();
    for (const auto& r : i.rules) rules.push_back({{"answer", r.answer}, {"any_of", r.any_of}});
    json j{{"item_id", i.item_id},
           {"prompt_text", i.prompt_text},
           {"modality", i.modality == ItemModality::text ? "text" : "image_descriptor"},
           {"human_expected", i.human_expected},
           {"llm_prototypical", i.llm_prototypical},
           {"canonicalizer_id", i.canonicalizer_id},
           {"rules", rules}};
    if (!i.fallback_description.empty()) j["fallback_description"] = i.fallback_description;
    return j;
}

CheckItem item_from_json(const json& j) {
    CheckItem i;
    i.item_id = j.at("item_id").get<std::string>();
    i.prompt_text = j.at("prompt_text").get<std::string>();
    const auto modality = j.value("modality", std::string("text"));
    if (modality == "text") {
        i.modality = ItemModality::text;
    } else if (modality == "image_descriptor") {
        i.modality = ItemModality::image_descriptor;
    } else {
        throw ConfigError("check item " + i.item_id + ": unknown modality '" + modality + "'");
    }
    i.fallback_description = j.value("fallback_description", std::string());
    i.human_expected = j.at("human_expected").get<std::set<std::string>>();
    i.llm_prototypical = j.at("llm_prototypical").get<std::set<std::string>>();
    i.canonicalizer_id = j.value("canonicalizer_id", std::string("keyword_rules"));
    for (const auto& r : j.value("rules", json::array())) {
        i.rules.push_back({r.at("answer").get<std::string>(),
                           r.at("any_of").get<std::vector<std::string>>()});
    }
    validate_item(i);
    return i;
}

}  // namespace

std::vector<CheckItem> parse_item_bank(std::string_view json_text) {
    std::vector<CheckItem> items;
    try {
        const json j = json::parse(json_text);
        if (!j.is_array()) throw ConfigError("item bank must be a JSON array");
        for (const auto& e : j) items.push_back(item_from_json(e));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("item bank: ") + e.what());
    }
    return items;
}

std::string dump_item_bank(std::span<const CheckItem> items) {
    json j = json::array();
    for (const auto& i : items) j.push_back(item_to_json(i));
    return j.dump(2) + "\n";
}

}  // namespace sentinel::comprehension
