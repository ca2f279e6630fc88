#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/check_item.hpp"
#include "sentinel/policy.hpp"
#include "sentinel/trap_spec.hpp"

namespace sentinel {

enum class ItemKind { open_text, choice, check };

std::string_view to_string(ItemKind k);

struct ItemDecl {
    std::string item_id;
    ItemKind kind = ItemKind::open_text;
    std::string prompt;
};

/// challenge: pass/fail checkpoint recorded as score 1 or 0 (failure blocks
/// advancing). score: behavioural risk score in [0,1].
enum class CaptchaKind { challenge, score };

struct CaptchaCheckpoint {
    std::string checkpoint_id;
    CaptchaKind kind = CaptchaKind::score;
};

struct NormTexts {
    std::string notice;
    std::string affirmation;
};

struct TrapSettings {
    std::string keyword = "hazelnut";
    std::uint64_t seed = 7;
};

struct StudyConfig {
    std::string study_id;
    std::vector<ItemDecl> items;
    TrapSettings trap_settings;
    std::vector<TrapSpec> traps;  // derived from trap_settings at load
    ScoringPolicy policy;
    BehaviorThresholds behavior;
    TextThresholds text;
    ComprehensionPolicy comprehension;
    std::vector<CheckItem> check_items;
    std::vector<CaptchaCheckpoint> captcha_checkpoints;
    NormTexts norms;
    bool retain_clipboard_text = false;
    std::size_t max_response_chars = 20000;
    std::string access_token;  // empty = no shared-token check

    [[nodiscard]] const ItemDecl* find_item(std::string_view item_id) const;
    [[nodiscard]] const CheckItem* find_check_item(std::string_view item_id) const;
    [[nodiscard]] std::optional<CaptchaKind> checkpoint_kind(std::string_view checkpoint_id) const;
    [[nodiscard]] bool is_open_text(std::string_view item_id) const;
    [[nodiscard]] const TrapSpec* find_trap(std::string_view trap_id) const;
};

/// Default norm-signalling notice shown before the study starts.
std::string default_study_notice();
/// Default affirmation participants must grant.
std::string default_affirmation_text();

/// A self-contained demo study: two open-text items, one choice item, the
/// three built-in comprehension checks and three captcha checkpoints.
StudyConfig default_study_config(std::string study_id = "demo-study");

/// Parses the declarative study file (JSON object syntax). Relative item bank
/// paths resolve against `base_dir`. Generates traps and validates everything.
StudyConfig parse_study_config(std::string_view json_text,
                               const std::filesystem::path& base_dir = {});
StudyConfig load_study_config(const std::filesystem::path& path);

/// Serializes a config so that parse_study_config reproduces it.
std::string dump_study_config(const StudyConfig& cfg);

/// Validates invariants and (re)generates traps. Throws ConfigError.
void finalize_study_config(StudyConfig& cfg);

}  // namespace sentinel
