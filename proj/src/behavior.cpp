#include "sentinel/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sentinel/unicode.hpp"

namespace sentinel::behavior {

namespace {

bool is_printable_label(const std::string& key) { return text::codepoint_count(key) == 1; }

/// Seqs of visible events that end a hidden period longer than `hidden_ms`.
std::vector<std::int64_t> focus_shift_seqs(std::span<const TelemetryEvent> events, int hidden_ms) {
    std::vector<std::int64_t> out;
    std::optional<std::int64_t> hidden_at;
    for (const auto& e : events) {
        const auto* v = std::get_if<VisibilityPayload>(&e.payload);
        if (v == nullptr) continue;
        if (v->hidden) {
            hidden_at = e.t_ms;
        } else if (hidden_at) {
            if (e.t_ms - *hidden_at > hidden_ms) out.push_back(e.seq);
            hidden_at.reset();
        }
    }
    return out;
}

}  // namespace

std::optional<double> coefficient_of_variation(std::span<const double> xs) {
    if (xs.empty()) return std::nullopt;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    const double sd = std::sqrt(var);
    if (sd == 0.0) return 0.0;
    if (mean <= 0.0) return std::nullopt;
    return sd / mean;
}

BehaviorFeatures extract_features(std::span<const TelemetryEvent> events,
                                  const BehaviorThresholds& thresholds) {
    BehaviorFeatures f;
    std::optional<std::int64_t> last_down;
    std::map<std::string, std::vector<std::int64_t>> open_downs;
    std::vector<std::pair<double, double>> mouse;
    std::set<std::int64_t> active_windows;

    for (const auto& e : events) {
        switch (e.kind) {
            case EventKind::key_down: {
                const auto& key = std::get<KeyPayload>(e.payload).key;
                ++f.n_keydown;
                if (is_printable_label(key)) ++f.n_printable_keydown;
                if (key == "Backspace") ++f.n_backspace;
                if (last_down) f.interkey_latencies_ms.push_back(static_cast<double>(e.t_ms - *last_down));
                last_down = e.t_ms;
                open_downs[key].push_back(e.t_ms);
                active_windows.insert(e.t_ms / 1000);
                break;
            }
            case EventKind::key_up: {
                const auto& key = std::get<KeyPayload>(e.payload).key;
                auto it = open_downs.find(key);
                if (it == open_downs.end() || it->second.empty()) {
                    ++f.unmatched_key_ups;
                } else {
                    f.dwell_times_ms.push_back(static_cast<double>(e.t_ms - it->second.back()));
                    it->second.pop_back();
                }
                active_windows.insert(e.t_ms / 1000);
                break;
            }
            case EventKind::mouse_move: {
                const auto& m = std::get<MousePayload>(e.payload);
                mouse.emplace_back(m.x, m.y);
                active_windows.insert(e.t_ms / 1000);
                break;
            }
            case EventKind::clipboard: {
                switch (std::get<ClipboardPayload>(e.payload).action) {
                    case ClipboardAction::paste: ++f.paste_attempts; break;
                    case ClipboardAction::copy: ++f.copy_attempts; break;
                    case ClipboardAction::cut: ++f.cut_attempts; break;
                }
                break;
            }
            default: break;
        }
    }

    if (static_cast<int>(f.interkey_latencies_ms.size()) >= thresholds.min_latencies) {
        f.latency_cv = coefficient_of_variation(f.interkey_latencies_ms);
    }
    f.mouse_samples = static_cast<int>(mouse.size());
    if (mouse.size() >= 3) {
        std::size_t straight = 0;
        for (std::size_t i = 0; i + 2 < mouse.size(); ++i) {
            const auto [ax, ay] = mouse[i];
            const auto [bx, by] = mouse[i + 1];
            const auto [cx, cy] = mouse[i + 2];
            const double area = 0.5 * std::abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
            if (area < thresholds.collinear_area_px2) ++straight;
        }
        f.straight_fraction = static_cast<double>(straight) / static_cast<double>(mouse.size() - 2);
    }
    f.focus_shifts = static_cast<int>(focus_shift_seqs(events, thresholds.focus_hidden_ms).size());
    f.active_time_s = static_cast<int>(active_windows.size());
    return f;
}

std::vector<ItemSegment> segment_by_item(std::span<const TelemetryEvent> events) {
    std::vector<ItemSegment> out;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto* r = std::get_if<ResponsePayload>(&events[i].payload);
        if (r == nullptr) continue;
        out.push_back({r->item_id, events.subspan(begin, i - begin + 1),
                       {r->item_id, r->text, events[i].t_ms, r->input_mode}});
        begin = i + 1;
    }
    return out;
}

std::optional<DetectionSignal> uniform_typing_detector(const BehaviorFeatures& f,
                                                       const BehaviorThresholds& t,
                                                       const std::string& session_id) {
    if (static_cast<int>(f.interkey_latencies_ms.size()) < t.min_latencies || !f.latency_cv) {
        return std::nullopt;
    }
    const double cv = *f.latency_cv;
    if (!(cv < t.cv_threshold)) return std::nullopt;
    return DetectionSignal{"behavior.uniform_typing", session_id,
                           Unit::clamped((t.cv_threshold - cv) / t.cv_threshold),
                           VariantHint::full_delegation,
                           {{"latency_cv", std::to_string(cv)},
                            {"latencies", std::to_string(f.interkey_latencies_ms.size())}}};
}

std::optional<DetectionSignal> mouse_linearity_detector(const BehaviorFeatures& f,
                                                        const BehaviorThresholds& t,
                                                        const std::string& session_id) {
    if (f.mouse_samples < t.min_mouse_samples || !f.straight_fraction) return std::nullopt;
    if (!(*f.straight_fraction > t.straight_fraction)) return std::nullopt;
    return DetectionSignal{"behavior.mouse_linearity", session_id,
                           Unit::clamped(*f.straight_fraction), VariantHint::full_delegation,
                           {{"straight_fraction", std::to_string(*f.straight_fraction)},
                            {"mouse_samples", std::to_string(f.mouse_samples)}}};
}

std::optional<DetectionSignal> keystroke_length_consistency(const BehaviorFeatures& features,
                                                            const ResponseRecord& response,
                                                            const BehaviorThresholds& t,
                                                            const std::string& session_id) {
    if (response.input_mode != InputMode::typed) return std::nullopt;
    const auto len = static_cast<double>(text::codepoint_count(response.text));
    if (len < t.min_response_chars) return std::nullopt;
    const double typed = std::max(0, features.n_printable_keydown - features.n_backspace);
    const double expected = t.keystroke_ratio * len;
    if (!(typed < expected)) return std::nullopt;
    return DetectionSignal{"behavior.keystroke_length", session_id,
                           Unit::clamped(1.0 - typed / expected), VariantHint::partial_mediation,
                           {{"item_id", response.item_id},
                            {"effective_keystrokes", std::to_string(static_cast<long>(typed))},
                            {"response_chars", std::to_string(static_cast<long>(len))}}};
}

std::optional<DetectionSignal> clipboard_detector(std::span<const TelemetryEvent> events,
                                                  const StudyConfig& config,
                                                  const std::string& session_id) {
    int pastes = 0;
    Evidence ev;
    for (const auto& seg : segment_by_item(events)) {
        if (!config.is_open_text(seg.item_id)) continue;
        for (const auto& e : seg.events) {
            const auto* c = std::get_if<ClipboardPayload>(&e.payload);
            if (c == nullptr) continue;
            if (c->action == ClipboardAction::paste) ++pastes;
            ev.emplace_back("clipboard", std::string(to_string(c->action)) +
                                             " length=" + std::to_string(c->length) +
                                             " blocked=" + (c->blocked ? "true" : "false") +
                                             " seq=" + std::to_string(e.seq));
        }
    }
    if (pastes < 1) return std::nullopt;
    ev.insert(ev.begin(), {"paste_attempts", std::to_string(pastes)});
    return DetectionSignal{"behavior.clipboard", session_id,
                           Unit::clamped(std::min(1.0, 0.4 + 0.2 * (pastes - 1))),
                           VariantHint::partial_mediation, std::move(ev)};
}

std::optional<DetectionSignal> focus_shift_detector(const BehaviorFeatures& features,
                                                    const BehaviorThresholds& t,
                                                    const std::string& session_id) {
    if (features.focus_shifts < t.min_focus_shifts) return std::nullopt;
    return DetectionSignal{"behavior.focus_shift", session_id,
                           Unit::clamped(std::min(1.0, features.focus_shifts / 10.0)),
                           VariantHint::partial_mediation,
                           {{"focus_shifts", std::to_string(features.focus_shifts)}}};
}

std::vector<DetectionSignal> run_behavior_detectors(const SessionRecord& session,
                                                    const StudyConfig& config) {
    const auto& t = config.behavior;
    const auto& sid = session.session_id;
    std::vector<DetectionSignal> out;
    const auto whole = extract_features(session.events, t);
    if (auto s = uniform_typing_detector(whole, t, sid)) out.push_back(std::move(*s));
    if (auto s = mouse_linearity_detector(whole, t, sid)) out.push_back(std::move(*s));

    // Shifts are attributed to the item whose segment holds the return to the page.
    const auto shifts = focus_shift_seqs(session.events, t.focus_hidden_ms);
    BehaviorFeatures open_text_focus;
    for (const auto& seg : segment_by_item(session.events)) {
        const auto seg_features = extract_features(seg.events, t);
        if (auto s = keystroke_length_consistency(seg_features, seg.response, t, sid)) {
            out.push_back(std::move(*s));
        }
        if (!config.is_open_text(seg.item_id) || seg.events.empty()) continue;
        const auto lo = seg.events.front().seq;
        const auto hi = seg.events.back().seq;
        open_text_focus.focus_shifts += static_cast<int>(std::count_if(
            shifts.begin(), shifts.end(), [&](std::int64_t q) { return q >= lo && q <= hi; }));
    }
    if (auto s = focus_shift_detector(open_text_focus, t, sid)) out.push_back(std::move(*s));
    if (auto s = clipboard_detector(session.events, config, sid)) out.push_back(std::move(*s));
    return out;
}

nlohmann::json features_to_json(const BehaviorFeatures& f) {
    nlohmann::json j;
    j["n_keydown"] = f.n_keydown;
    j["n_printable_keydown"] = f.n_printable_keydown;
    j["n_backspace"] = f.n_backspace;
    j["interkey_latencies_ms"] = f.interkey_latencies_ms;
    j["dwell_times_ms"] = f.dwell_times_ms;
    j["latency_cv"] = f.latency_cv ? nlohmann::json(*f.latency_cv) : nlohmann::json(nullptr);
    j["mouse_samples"] = f.mouse_samples;
    j["straight_fraction"] =
        f.straight_fraction ? nlohmann::json(*f.straight_fraction) : nlohmann::json(nullptr);
    j["focus_shifts"] = f.focus_shifts;
    j["paste_attempts"] = f.paste_attempts;
    j["copy_attempts"] = f.copy_attempts;
    j["cut_attempts"] = f.cut_attempts;
    j["active_time_s"] = f.active_time_s;
    j["unmatched_key_ups"] = f.unmatched_key_ups;
    return j;
}

}  // namespace sentinel::behavior
