#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/trap_spec.hpp"
#include "sentinel/types.hpp"

namespace sentinel::honeypot {

inline constexpr std::string_view kCheckboxInputName = "agree_to_terms_v1";
inline constexpr std::string_view kCheckboxLabelFor = "agreement_v1";
inline constexpr std::string_view kCheckboxLabelText = "You agree to the terms and conditions";

/// Hidden instruction for the given keyword.
std::string instruction_for(std::string_view keyword);

/// Exact style attribute for a technique (container style for the checkbox).
std::string_view style_for(TrapTechnique t);

/// Checks the keyword shape (single lowercase word, 3-30 chars, not a stop
/// word) and that it does not occur in any item prompt. Throws ConfigError.
void check_keyword(std::string_view keyword, std::span<const ItemDecl> items);

/// One text trap per open-text item, technique drawn from `seed`, plus one
/// hidden checkbox per study. Deterministic in (items, keyword, seed).
std::vector<TrapSpec> generate_traps(const StudyConfig& config, std::uint64_t seed);

/// Markup descriptor for one element. Children render after inner_text.
struct MarkupFragment {
    std::string tag;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string inner_text;
    std::vector<MarkupFragment> children;

    [[nodiscard]] std::string to_html() const;
    friend bool operator==(const MarkupFragment&, const MarkupFragment&) = default;
};

MarkupFragment render_directives(const TrapSpec& trap);

/// One signal per trap whose keyword occurs in the response as a whole word
/// (NFC, case-insensitive). Evidence offsets are UTF-8 byte offsets into the
/// normalized response text.
std::vector<DetectionSignal> scan_response(const ResponseRecord& response,
                                           std::span<const TrapSpec> traps,
                                           const std::string& session_id = {});

struct CheckboxScan {
    std::vector<DetectionSignal> signals;
    std::vector<std::string> warnings;
};

/// One signal per interaction with a hidden checkbox trap. Interactions with
/// unknown trap ids produce a warning instead.
CheckboxScan scan_checkbox(std::span<const TelemetryEvent> events, std::span<const TrapSpec> traps,
                           const std::string& session_id = {});

/// Byte offsets [begin, end) of whole-word occurrences of `keyword` in the
/// already lowercased NFC text.
std::vector<std::pair<std::size_t, std::size_t>> find_word(std::string_view text,
                                                           std::string_view keyword);

}  // namespace sentinel::honeypot
