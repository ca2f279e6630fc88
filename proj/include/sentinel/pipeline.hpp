#pragma once

#include <span>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/screening.hpp"
#include "sentinel/types.hpp"

namespace sentinel::pipeline {

struct PipelineOptions {
    const screening::AiTextDetector* external = nullptr;  // optional adapter
};

/// Open-text responses of a session, as input to cross-session clustering.
std::vector<screening::ResponseEntry> open_text_entries(const SessionRecord& session,
                                                        const StudyConfig& config);

/// Clusters the open-text responses of a whole study.
screening::DuplicateResult study_duplicates(std::span<const SessionRecord> sessions,
                                            const StudyConfig& config);

/// Every enabled detector over one session: honeypot scans, behavioral
/// detectors, text screening, comprehension checks and captcha policy.
/// `duplicates` carries the study-wide clustering (may be null).
PollutionAssessment assess_session(const SessionRecord& session, const StudyConfig& config,
                                   const screening::DuplicateResult* duplicates,
                                   const PipelineOptions& options = {});

/// Assessments for every session, clustering across the given set.
std::vector<PollutionAssessment> assess_corpus(std::span<const SessionRecord> sessions,
                                               const StudyConfig& config,
                                               const PipelineOptions& options = {});

}  // namespace sentinel::pipeline
