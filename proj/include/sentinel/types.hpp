#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sentinel {

/// Base for every error this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid study configuration, item bank or policy.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Real number constrained to [0,1]. Out-of-range or NaN input is rejected at
/// construction; nothing is clamped afterwards.
class Unit {
public:
    constexpr Unit() = default;
    explicit Unit(double v);

    [[nodiscard]] constexpr double value() const { return v_; }
    constexpr operator double() const { return v_; }

    /// Clamps arithmetic results that are in range up to rounding.
    static Unit clamped(double v);

    friend constexpr bool operator==(Unit a, Unit b) { return a.v_ == b.v_; }

private:
    double v_ = 0.0;
};

enum class EventKind {
    key_down,
    key_up,
    mouse_move,
    visibility,
    clipboard,
    trap_interaction,
    speech_transcript,
    captcha_score,
    response_submit,
    affirmation,
};

enum class ClipboardAction { copy, paste, cut };
enum class InputMode { typed, speech, choice };
enum class VariantHint { partial_mediation, full_delegation, unknown };
enum class Decision { pass, flag, exclude };

std::string_view to_string(EventKind k);
std::string_view to_string(ClipboardAction a);
std::string_view to_string(InputMode m);
std::string_view to_string(VariantHint v);
std::string_view to_string(Decision d);

std::optional<EventKind> parse_event_kind(std::string_view s);
std::optional<ClipboardAction> parse_clipboard_action(std::string_view s);
std::optional<InputMode> parse_input_mode(std::string_view s);
std::optional<VariantHint> parse_variant_hint(std::string_view s);
std::optional<Decision> parse_decision(std::string_view s);

// Event payloads, one per kind family. key_down and key_up share KeyPayload.
struct KeyPayload {
    std::string key;
    friend bool operator==(const KeyPayload&, const KeyPayload&) = default;
};

struct MousePayload {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const MousePayload&, const MousePayload&) = default;
};

struct VisibilityPayload {
    bool hidden = false;
    friend bool operator==(const VisibilityPayload&, const VisibilityPayload&) = default;
};

struct ClipboardPayload {
    ClipboardAction action = ClipboardAction::paste;
    std::int64_t length = 0;
    std::optional<std::string> text;
    bool blocked = false;
    friend bool operator==(const ClipboardPayload&, const ClipboardPayload&) = default;
};

struct TrapPayload {
    std::string trap_id;
    friend bool operator==(const TrapPayload&, const TrapPayload&) = default;
};

struct SpeechPayload {
    std::string text;
    friend bool operator==(const SpeechPayload&, const SpeechPayload&) = default;
};

struct CaptchaPayload {
    std::string checkpoint_id;
    Unit score;
    friend bool operator==(const CaptchaPayload&, const CaptchaPayload&) = default;
};

struct ResponsePayload {
    std::string item_id;
    std::string text;
    InputMode input_mode = InputMode::typed;
    friend bool operator==(const ResponsePayload&, const ResponsePayload&) = default;
};

struct AffirmationPayload {
    bool granted = false;
    friend bool operator==(const AffirmationPayload&, const AffirmationPayload&) = default;
};

using Payload = std::variant<KeyPayload, MousePayload, VisibilityPayload, ClipboardPayload,
                             TrapPayload, SpeechPayload, CaptchaPayload, ResponsePayload,
                             AffirmationPayload>;

/// Does `payload` hold the alternative that `kind` requires?
bool payload_matches(EventKind kind, const Payload& payload);

struct TelemetryEvent {
    std::int64_t seq = 0;
    std::int64_t t_ms = 0;
    EventKind kind = EventKind::key_down;
    Payload payload;

    friend bool operator==(const TelemetryEvent&, const TelemetryEvent&) = default;

    static TelemetryEvent key_down(std::int64_t seq, std::int64_t t, std::string key);
    static TelemetryEvent key_up(std::int64_t seq, std::int64_t t, std::string key);
    static TelemetryEvent mouse_move(std::int64_t seq, std::int64_t t, double x, double y);
    static TelemetryEvent visibility(std::int64_t seq, std::int64_t t, bool hidden);
    static TelemetryEvent clipboard(std::int64_t seq, std::int64_t t, ClipboardPayload p);
    static TelemetryEvent trap_interaction(std::int64_t seq, std::int64_t t, std::string trap_id);
    static TelemetryEvent speech_transcript(std::int64_t seq, std::int64_t t, std::string text);
    static TelemetryEvent captcha_score(std::int64_t seq, std::int64_t t, std::string checkpoint,
                                        Unit score);
    static TelemetryEvent response_submit(std::int64_t seq, std::int64_t t, ResponsePayload r);
    static TelemetryEvent affirmation(std::int64_t seq, std::int64_t t, bool granted);
};

struct ResponseRecord {
    std::string item_id;
    std::string text;
    std::int64_t submitted_at = 0;
    InputMode input_mode = InputMode::typed;
    friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

struct CaptchaScore {
    std::string checkpoint_id;
    Unit score;
    friend bool operator==(const CaptchaScore&, const CaptchaScore&) = default;
};

/// One participant session. The event stream is the single source of truth:
/// responses, captcha scores and the affirmation state are views over it.
struct SessionRecord {
    std::string session_id;
    std::string study_id;
    std::int64_t created_at = 0;
    std::map<std::string, std::string> client_meta;
    std::vector<TelemetryEvent> events;

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;

    [[nodiscard]] std::vector<ResponseRecord> responses() const;
    [[nodiscard]] std::vector<CaptchaScore> captcha_scores() const;
    [[nodiscard]] bool affirmation_given() const;
};

using Evidence = std::vector<std::pair<std::string, std::string>>;

inline const std::vector<std::string>& detector_families() {
    static const std::vector<std::string> families{"honeypot", "behavior",      "text",
                                                   "comprehension", "captcha", "external"};
    return families;
}

/// Family prefix of a family-qualified detector id ("honeypot.keyword" -> "honeypot").
std::string family_of(std::string_view detector_id);

struct DetectionSignal {
    std::string detector_id;
    std::string session_id;
    Unit severity;
    VariantHint variant_hint = VariantHint::unknown;
    Evidence evidence;

    friend bool operator==(const DetectionSignal&, const DetectionSignal&) = default;
    friend bool operator<(const DetectionSignal& a, const DetectionSignal& b);
};

struct VariantDistribution {
    double partial_mediation = 0.0;
    double full_delegation = 0.0;
    double unknown = 1.0;
    friend bool operator==(const VariantDistribution&, const VariantDistribution&) = default;
};

struct PollutionAssessment {
    std::string session_id;
    Unit score;
    Decision decision = Decision::pass;
    std::vector<DetectionSignal> signals;
    std::set<std::string> families_triggered;
    std::map<std::string, double> family_severity;
    VariantDistribution variant;
    std::vector<std::string> warnings;

    friend bool operator==(const PollutionAssessment&, const PollutionAssessment&) = default;
};

}  // namespace sentinel
