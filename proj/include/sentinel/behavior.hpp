#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/policy.hpp"
#include "sentinel/types.hpp"

namespace sentinel::behavior {

struct BehaviorFeatures {
    int n_keydown = 0;
    int n_printable_keydown = 0;
    int n_backspace = 0;
    std::vector<double> interkey_latencies_ms;
    std::vector<double> dwell_times_ms;
    std::optional<double> latency_cv;
    int mouse_samples = 0;
    std::optional<double> straight_fraction;
    int focus_shifts = 0;
    int paste_attempts = 0;
    int copy_attempts = 0;
    int cut_attempts = 0;
    int active_time_s = 0;
    int unmatched_key_ups = 0;  // data-quality note, not a signal

    friend bool operator==(const BehaviorFeatures&, const BehaviorFeatures&) = default;
};

/// Features over an ordered event stream. Latency cv needs at least
/// `min_latencies` samples; straight_fraction at least three mouse samples.
BehaviorFeatures extract_features(std::span<const TelemetryEvent> events,
                                  const BehaviorThresholds& thresholds = {});
inline BehaviorFeatures extract_features(const SessionRecord& session,
                                         const BehaviorThresholds& thresholds = {}) {
    return extract_features(session.events, thresholds);
}

/// Events leading up to one response: everything after the previous
/// response_submit, through this one. Events after the last submission are
/// not attributed to any item.
struct ItemSegment {
    std::string item_id;
    std::span<const TelemetryEvent> events;
    ResponseRecord response;
};

std::vector<ItemSegment> segment_by_item(std::span<const TelemetryEvent> events);

/// Population coefficient of variation; 0 for a constant series, nullopt when
/// empty or the mean is not positive with non-zero spread.
std::optional<double> coefficient_of_variation(std::span<const double> xs);

std::optional<DetectionSignal> uniform_typing_detector(const BehaviorFeatures& f,
                                                       const BehaviorThresholds& t,
                                                       const std::string& session_id = {});

std::optional<DetectionSignal> mouse_linearity_detector(const BehaviorFeatures& f,
                                                        const BehaviorThresholds& t,
                                                        const std::string& session_id = {});

/// `features` should cover the events typed for this response (see
/// segment_by_item). Only typed responses are checked.
std::optional<DetectionSignal> keystroke_length_consistency(const BehaviorFeatures& features,
                                                            const ResponseRecord& response,
                                                            const BehaviorThresholds& t,
                                                            const std::string& session_id = {});

/// Paste attempts (blocked or not) on pages hosting an open-text item.
std::optional<DetectionSignal> clipboard_detector(std::span<const TelemetryEvent> events,
                                                  const StudyConfig& config,
                                                  const std::string& session_id = {});

/// `features.focus_shifts` should count shifts during open-text items only.
std::optional<DetectionSignal> focus_shift_detector(const BehaviorFeatures& features,
                                                    const BehaviorThresholds& t,
                                                    const std::string& session_id = {});

/// Runs every behavioral detector over a session.
std::vector<DetectionSignal> run_behavior_detectors(const SessionRecord& session,
                                                    const StudyConfig& config);

/// Flat key/value dump, keys exactly as the feature field names.
nlohmann::json features_to_json(const BehaviorFeatures& f);

}  // namespace sentinel::behavior
