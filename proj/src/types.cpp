#include "sentinel/types.hpp"

#include <array>
#include <cmath>
#include <tuple>

namespace sentinel {

Unit::Unit(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("value outside [0,1]: " + std::to_string(v));
    }
}

Unit Unit::clamped(double v) {
    if (std::isnan(v)) throw std::invalid_argument("NaN is not a unit value");
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return Unit(v);
}

namespace {

constexpr std::array<std::string_view, 10> kEventKindNames{
    "key_down",          "key_up",        "mouse_move",      "visibility", "clipboard",
    "trap_interaction",  "speech_transcript", "captcha_score", "response_submit", "affirmation"};
constexpr std::array<std::string_view, 3> kClipboardNames{"copy", "paste", "cut"};
constexpr std::array<std::string_view, 3> kInputModeNames{"typed", "speech", "choice"};
constexpr std::array<std::string_view, 3> kVariantNames{"partial_mediation", "full_delegation",
                                                        "unknown"};
constexpr std::array<std::string_view, 3> kDecisionNames{"pass", "flag", "exclude"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(EventKind k) { return kEventKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(ClipboardAction a) { return kClipboardNames[static_cast<std::size_t>(a)]; }
std::string_view to_string(InputMode m) { return kInputModeNames[static_cast<std::size_t>(m)]; }
std::string_view to_string(VariantHint v) { return kVariantNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Decision d) { return kDecisionNames[static_cast<std::size_t>(d)]; }

std::optional<EventKind> parse_event_kind(std::string_view s) {
    return lookup<EventKind>(kEventKindNames, s);
}
std::optional<ClipboardAction> parse_clipboard_action(std::string_view s) {
    return lookup<ClipboardAction>(kClipboardNames, s);
}
std::optional<InputMode> parse_input_mode(std::string_view s) {
    return lookup<InputMode>(kInputModeNames, s);
}
std::optional<VariantHint> parse_variant_hint(std::string_view s) {
    return lookup<VariantHint>(kVariantNames, s);
}
std::optional<Decision> parse_decision(std::string_view s) {
    return lookup<Decision>(kDecisionNames, s);
}

bool payload_matches(EventKind kind, const Payload& payload) {
    switch (kind) {
        case EventKind::key_down:
        case EventKind::key_up: return std::holds_alternative<KeyPayload>(payload);
        case EventKind::mouse_move: return std::holds_alternative<MousePayload>(payload);
        case EventKind::visibility: return std::holds_alternative<VisibilityPayload>(payload);
        case EventKind::clipboard: return std::holds_alternative<ClipboardPayload>(payload);
        case EventKind::trap_interaction: return std::holds_alternative<TrapPayload>(payload);
        case EventKind::speech_transcript: return std::holds_alternative<SpeechPayload>(payload);
        case EventKind::captcha_score: return std::holds_alternative<CaptchaPayload>(payload);
        case EventKind::response_submit: return std::holds_alternative<ResponsePayload>(payload);
        case EventKind::affirmation: return std::holds_alternative<AffirmationPayload>(payload);
    }
    return false;
}

TelemetryEvent TelemetryEvent::key_down(std::int64_t seq, std::int64_t t, std::string key) {
    return {seq, t, EventKind::key_down, KeyPayload{std::move(key)}};
}
TelemetryEvent TelemetryEvent::key_up(std::int64_t seq, std::int64_t t, std::string key) {
    return {seq, t, EventKind::key_up, KeyPayload{std::move(key)}};
}
TelemetryEvent TelemetryEvent::mouse_move(std::int64_t seq, std::int64_t t, double x, double y) {
    return {seq, t, EventKind::mouse_move, MousePayload{x, y}};
}
TelemetryEvent TelemetryEvent::visibility(std::int64_t seq, std::int64_t t, bool hidden) {
    return {seq, t, EventKind::visibility, VisibilityPayload{hidden}};
}
TelemetryEvent TelemetryEvent::clipboard(std::int64_t seq, std::int64_t t, ClipboardPayload p) {
    return {seq, t, EventKind::clipboard, std::move(p)};
}
TelemetryEvent TelemetryEvent::trap_interaction(std::int64_t seq, std::int64_t t,
                                                std::string trap_id) {
    return {seq, t, EventKind::trap_interaction, TrapPayload{std::move(trap_id)}};
}
TelemetryEvent TelemetryEvent::speech_transcript(std::int64_t seq, std::int64_t t,
                                                 std::string text) {
    return {seq, t, EventKind::speech_transcript, SpeechPayload{std::move(text)}};
}
TelemetryEvent TelemetryEvent::captcha_score(std::int64_t seq, std::int64_t t,
                                             std::string checkpoint, Unit score) {
    return {seq, t, EventKind::captcha_score, CaptchaPayload{std::move(checkpoint), score}};
}
TelemetryEvent TelemetryEvent::response_submit(std::int64_t seq, std::int64_t t,
                                               ResponsePayload r) {
    return {seq, t, EventKind::response_submit, std::move(r)};
}
TelemetryEvent TelemetryEvent::affirmation(std::int64_t seq, std::int64_t t, bool granted) {
    return {seq, t, EventKind::affirmation, AffirmationPayload{granted}};
}

std::vector<ResponseRecord> SessionRecord::responses() const {
    std::vector<ResponseRecord> out;
    for (const auto& e : events) {
        if (const auto* r = std::get_if<ResponsePayload>(&e.payload)) {
            out.push_back({r->item_id, r->text, e.t_ms, r->input_mode});
        }
    }
    return out;
}

std::vector<CaptchaScore> SessionRecord::captcha_scores() const {
    std::vector<CaptchaScore> out;
    for (const auto& e : events) {
        if (const auto* c = std::get_if<CaptchaPayload>(&e.payload)) {
            out.push_back({c->checkpoint_id, c->score});
        }
    }
    return out;
}

bool SessionRecord::affirmation_given() const {
    bool given = false;
    for (const auto& e : events) {
        if (const auto* a = std::get_if<AffirmationPayload>(&e.payload)) given = a->granted;
    }
    return given;
}

std::string family_of(std::string_view detector_id) {
    auto dot = detector_id.find('.');
    return std::string(detector_id.substr(0, dot));
}

bool operator<(const DetectionSignal& a, const DetectionSignal& b) {
    return std::tie(a.detector_id, a.session_id, a.evidence) <
               std::tie(b.detector_id, b.session_id, b.evidence) ||
           (std::tie(a.detector_id, a.session_id, a.evidence) ==
                std::tie(b.detector_id, b.session_id, b.evidence) &&
            std::make_pair(a.severity.value(), static_cast<int>(a.variant_hint)) <
                std::make_pair(b.severity.value(), static_cast<int>(b.variant_hint)));
}

}  // namespace sentinel
