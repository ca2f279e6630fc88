#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/policy.hpp"
#include "sentinel/types.hpp"

namespace sentinel::scoring {

struct CaptchaResult {
    std::optional<DetectionSignal> signal;
    std::optional<std::string> warning;
};

/// Fires when the lowest score falls below the policy threshold; severity is
/// the relative shortfall of that minimum.
CaptchaResult captcha_policy(std::span<const CaptchaScore> scores, const ScoringPolicy& policy,
                             const std::string& session_id = {});

/// A failed challenge checkpoint (recorded score below 0.5) is a full-severity
/// captcha signal.
std::optional<DetectionSignal> captcha_challenge_policy(std::span<const CaptchaScore> challenges,
                                                        const std::string& session_id = {});

/// Noisy-or over per-family maxima, then the flag / two-family exclude ladder.
/// Throws ConfigError for a signal from an unregistered family.
PollutionAssessment score_session(std::vector<DetectionSignal> signals, const ScoringPolicy& policy,
                                  const std::string& session_id = {});

/// Severity-weighted share of each variant hint.
VariantDistribution attribute_variant(std::span<const DetectionSignal> signals);

nlohmann::ordered_json signal_to_json(const DetectionSignal& s);

/// Canonical object: score, decision, per-family s_d, variant distribution,
/// signals and warnings.
nlohmann::ordered_json assessment_to_json(const PollutionAssessment& a);
PollutionAssessment assessment_from_json(const nlohmann::json& j);

}  // namespace sentinel::scoring
