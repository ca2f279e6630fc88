#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/pipeline.hpp"
#include "sentinel/types.hpp"

namespace sentinel::sim {

enum class ProfileKind {
    human,
    spillover_human,
    partial_mediation,
    full_delegation,
    honeypot_aware_delegation,
};

std::string_view to_string(ProfileKind k);
std::optional<ProfileKind> parse_profile_kind(std::string_view s);
/// Ground truth: any machine involvement counts as positive.
bool is_polluted(ProfileKind k);

enum class ResponseStyle { human, spillover, polished, agent };

/// Behavioural parameters of one simulated participant type. Defaults per kind
/// come from `AgentProfile::defaults`.
struct AgentProfile {
    ProfileKind kind = ProfileKind::human;

    // Typing: lognormal inter-key latency for people, a constant for agents.
    bool constant_timing = false;
    double interkey_log_mu = 5.1929568508902104;  // ln(180 ms)
    double interkey_log_sigma = 0.45;
    double constant_interkey_ms = 50.0;
    double dwell_log_mu = 4.5538768916005408;  // ln(95 ms)
    double dwell_log_sigma = 0.3;
    double constant_dwell_ms = 20.0;
    double backspace_rate = 0.05;
    double typo_rate = 0.0;

    // Mouse: random waypoints with Gaussian jitter, or straight lines.
    bool straight_mouse = false;
    int mouse_waypoints = 2;
    double mouse_jitter_px = 3.0;

    // Open-text mediation: focus shifts to another window, then a paste.
    double paste_probability = 0.0;
    double paste_fraction_min = 0.92;
    int focus_shifts_min = 0;
    int focus_shifts_max = 0;
    double stray_focus_shift_probability = 0.1;  // per open-text item

    ResponseStyle response_style = ResponseStyle::human;
    double filler_rate = 0.0;
    double marker_probability = 0.0;
    double prototypical_answer_rate = 0.05;  // comprehension checks
    double indeterminate_answer_rate = 0.10;

    bool sees_hidden_content = false;
    bool follows_hidden_instructions = false;
    bool touches_hidden_checkbox = false;

    double captcha_score_min = 0.7;
    double captcha_score_max = 1.0;

    static AgentProfile defaults(ProfileKind kind);
    /// Throws ConfigError when a probability leaves [0,1] or the delegation
    /// hidden-content invariant is broken.
    void validate() const;
};

/// Anomalies planted into an otherwise ordinary session (incidence corpora).
struct Plant {
    bool keyword = false;
    std::optional<double> captcha_score;
    bool challenge_failure = false;
    int blocked_pastes = 0;
};

struct LabeledSession {
    SessionRecord session;
    ProfileKind ground_truth = ProfileKind::human;
};

/// Deterministic in (profile, config, seed, plant).
LabeledSession simulate_session(const AgentProfile& profile, const StudyConfig& config,
                                std::uint64_t seed, const Plant& plant = {});

/// Sessions in ProfileKind order; session i uses seed + i.
std::vector<LabeledSession> generate_corpus(const std::map<ProfileKind, int>& mix,
                                            const StudyConfig& config, std::uint64_t seed);

struct IncidencePlan {
    int sessions = 1000;
    int keyword = 16;
    int low_captcha = 27;
    double lowest_captcha = 0.2;
    int keyword_with_low_captcha = 2;
    int captcha_failures = 2;
    int paste_attempts = 47;
};

/// Human sessions with the plan's anomalies planted at seed-shuffled positions.
std::vector<LabeledSession> generate_incidence_corpus(const IncidencePlan& plan,
                                                      const StudyConfig& config, std::uint64_t seed);

// ---- red-team metrics --------------------------------------------------------

struct BinaryMetrics {
    int tp = 0, fp = 0, tn = 0, fn = 0;

    [[nodiscard]] std::optional<double> precision() const;
    [[nodiscard]] std::optional<double> recall() const;
    [[nodiscard]] std::optional<double> false_positive_rate() const;
};

struct LabelStats {
    int sessions = 0;
    int flagged_or_excluded = 0;
    int excluded = 0;
    std::map<std::string, int> family_hits;

    [[nodiscard]] double positive_rate() const;
    [[nodiscard]] double family_rate(const std::string& family) const;
};

struct MetricsReport {
    std::map<std::string, BinaryMetrics> families;
    BinaryMetrics combined;
    std::map<ProfileKind, LabelStats> by_label;
};

/// Precision, recall and false-positive rate per family (any signal counts as
/// a positive prediction) and for the combined flag-or-exclude decision.
MetricsReport evaluate_detectors(std::span<const LabeledSession> corpus, const StudyConfig& config,
                                 const pipeline::PipelineOptions& options = {});

nlohmann::ordered_json metrics_to_json(const MetricsReport& m);

/// {session_id: profile} sidecar written next to simulated corpora.
nlohmann::ordered_json labels_to_json(std::span<const LabeledSession> corpus);

}  // namespace sentinel::sim
