#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/pipeline.hpp"
#include "sentinel/types.hpp"

namespace sentinel::report {

/// Percentage in tenths of a percent, rounded half up: 16 of 1000 -> 16 (1.6%).
std::int64_t percent_tenths(std::int64_t count, std::int64_t total);
/// "1.6%"
std::string format_percent(std::int64_t count, std::int64_t total);

struct IncidenceRow {
    std::string category;
    std::int64_t count = 0;
    std::int64_t percent_tenths = 0;
};

/// Study-level incidence summary. Percentages are over all created sessions
/// of the study, started or not.
struct SummaryReport {
    std::string study_id;
    std::int64_t sessions = 0;
    std::vector<IncidenceRow> rows;  // fixed order, see category names below
    std::int64_t duplicate_clusters = 0;
    std::int64_t decision_pass = 0;
    std::int64_t decision_flag = 0;
    std::int64_t decision_exclude = 0;

    [[nodiscard]] const IncidenceRow& row(std::string_view category) const;
};

inline constexpr std::string_view kCaptchaFailures = "captcha_failures";
inline constexpr std::string_view kLowCaptcha = "low_captcha_scores";
inline constexpr std::string_view kHoneypotKeyword = "honeypot_keyword";
inline constexpr std::string_view kCopyPaste = "copy_paste_attempts";
inline constexpr std::string_view kDuplicateResponses = "duplicate_responses";

/// Throws ConfigError for an empty session set.
SummaryReport study_report(std::span<const SessionRecord> sessions, const StudyConfig& config,
                           const pipeline::PipelineOptions& options = {});

nlohmann::ordered_json report_to_json(const SummaryReport& r);
std::string render_table(const SummaryReport& r);

}  // namespace sentinel::report
