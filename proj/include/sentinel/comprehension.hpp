#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/check_item.hpp"
#include "sentinel/policy.hpp"
#include "sentinel/types.hpp"

namespace sentinel::comprehension {

enum class CheckOutcome { human_consistent, llm_prototypical, indeterminate };

std::string_view to_string(CheckOutcome o);

/// Throws ConfigError on empty answer sets, overlapping sets, an unknown
/// canonicalizer or a rule answer outside both sets.
void validate_item(const CheckItem& item);

/// Canonical answer for free text, or nullopt when no rule applies.
std::optional<std::string> canonicalize(const CheckItem& item, std::string_view answer_text);

CheckOutcome evaluate_response(const CheckItem& item, std::string_view answer_text);

/// Fires when at least `policy.min_prototypical` outcomes are prototypical;
/// severity is the prototypical share. Indeterminate answers count toward n.
std::optional<DetectionSignal> aggregate_check_signal(std::span<const CheckOutcome> results,
                                                      const ComprehensionPolicy& policy,
                                                      const std::string& session_id = {});

/// Transparent-container false-belief story, modified Mueller-Lyer and
/// modified Ebbinghaus items.
std::vector<CheckItem> builtin_items();

/// Item bank file: JSON array of CheckItem objects.
std::vector<CheckItem> parse_item_bank(std::string_view json_text);
std::string dump_item_bank(std::span<const CheckItem> items);

}  // namespace sentinel::comprehension
