#include "sentinel/pipeline.hpp"

#include <algorithm>

#include "sentinel/behavior.hpp"
#include "sentinel/comprehension.hpp"
#include "sentinel/honeypot.hpp"
#include "sentinel/scoring.hpp"

namespace sentinel::pipeline {

std::vector<screening::ResponseEntry> open_text_entries(const SessionRecord& session,
                                                        const StudyConfig& config) {
    std::vector<screening::ResponseEntry> out;
    for (const auto& r : session.responses()) {
        if (config.is_open_text(r.item_id)) out.push_back({session.session_id, r.item_id, r.text});
    }
    return out;
}

screening::DuplicateResult study_duplicates(std::span<const SessionRecord> sessions,
                                            const StudyConfig& config) {
    std::vector<screening::ResponseEntry> entries;
    for (const auto& s : sessions) {
        auto e = open_text_entries(s, config);
        entries.insert(entries.end(), e.begin(), e.end());
    }
    return screening::duplicate_clusters(entries, config.text.duplicate_tau,
                                         config.text.max_compare_chars);
}

PollutionAssessment assess_session(const SessionRecord& session, const StudyConfig& config,
                                   const screening::DuplicateResult* duplicates,
                                   const PipelineOptions& options) {
    const auto& sid = session.session_id;
    const auto& policy = config.policy;
    std::vector<DetectionSignal> signals;
    std::vector<std::string> warnings;
    auto add = [&](DetectionSignal s) {
        if (policy.is_enabled(family_of(s.detector_id))) signals.push_back(std::move(s));
    };

    const auto responses = session.responses();

    if (policy.is_enabled("honeypot")) {
        for (const auto& r : responses) {
            for (auto& s : honeypot::scan_response(r, config.traps, sid)) add(std::move(s));
        }
        auto box = honeypot::scan_checkbox(session.events, config.traps, sid);
        for (auto& s : box.signals) add(std::move(s));
        warnings.insert(warnings.end(), box.warnings.begin(), box.warnings.end());
    }

    if (policy.is_enabled("behavior")) {
        for (auto& s : behavior::run_behavior_detectors(session, config)) add(std::move(s));
    }

    if (policy.is_enabled("text") || policy.is_enabled("external")) {
        for (const auto& r : responses) {
            if (!config.is_open_text(r.item_id)) continue;
            if (policy.is_enabled("text")) {
                if (auto st = screening::stylometric_flags(r.text, config.text, sid).signal) {
                    st->evidence.insert(st->evidence.begin(), {"item_id", r.item_id});
                    add(std::move(*st));
                }
            }
            if (policy.is_enabled("external") && options.external != nullptr) {
                auto ex = screening::external_detector(r.text, *options.external,
                                                       config.text.external_threshold, sid);
                if (ex.signal) {
                    ex.signal->evidence.insert(ex.signal->evidence.begin(), {"item_id", r.item_id});
                    add(std::move(*ex.signal));
                }
                if (ex.warning) warnings.push_back(*ex.warning);
            }
        }
        if (policy.is_enabled("text") && duplicates != nullptr) {
            const auto& ds = duplicates->signals;
            for (const auto& s : ds) {
                if (s.session_id == sid) add(s);
            }
        }
    }

    if (policy.is_enabled("comprehension")) {
        std::vector<comprehension::CheckOutcome> outcomes;
        for (const auto& r : responses) {
            const auto* item = config.find_item(r.item_id);
            if (item == nullptr || item->kind != ItemKind::check) continue;
            if (const auto* check = config.find_check_item(r.item_id)) {
                outcomes.push_back(comprehension::evaluate_response(*check, r.text));
            }
        }
        if (auto s = comprehension::aggregate_check_signal(outcomes, config.comprehension, sid)) {
            add(std::move(*s));
        }
    }

    if (policy.is_enabled("captcha")) {
        std::vector<CaptchaScore> scores;
        std::vector<CaptchaScore> challenges;
        for (const auto& c : session.captcha_scores()) {
            if (config.checkpoint_kind(c.checkpoint_id) == CaptchaKind::challenge) {
                challenges.push_back(c);
            } else {
                scores.push_back(c);
            }
        }
        auto cp = scoring::captcha_policy(scores, policy, sid);
        if (cp.signal) add(std::move(*cp.signal));
        if (cp.warning) warnings.push_back(*cp.warning);
        if (auto s = scoring::captcha_challenge_policy(challenges, sid)) add(std::move(*s));
    }

    auto assessment = scoring::score_session(std::move(signals), policy, sid);
    assessment.warnings = std::move(warnings);
    return assessment;
}

std::vector<PollutionAssessment> assess_corpus(std::span<const SessionRecord> sessions,
                                               const StudyConfig& config,
                                               const PipelineOptions& options) {
    const auto dups = study_duplicates(sessions, config);
    std::vector<PollutionAssessment> out;
    out.reserve(sessions.size());
    for (const auto& s : sessions) out.push_back(assess_session(s, config, &dups, options));
    return out;
}

}  // namespace sentinel::pipeline
