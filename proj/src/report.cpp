#include "sentinel/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "sentinel/honeypot.hpp"

namespace sentinel::report {

std::int64_t percent_tenths(std::int64_t count, std::int64_t total) {
    if (total <= 0) return 0;
    // round(1000 * count / total) with halves going up, in integers
    return (2000 * count + total) / (2 * total);
}

std::string format_percent(std::int64_t count, std::int64_t total) {
    const auto t = percent_tenths(count, total);
    return std::to_string(t / 10) + "." + std::to_string(t % 10) + "%";
}

const IncidenceRow& SummaryReport::row(std::string_view category) const {
    for (const auto& r : rows) {
        if (r.category == category) return r;
    }
    throw std::out_of_range("no report row " + std::string(category));
}

SummaryReport study_report(std::span<const SessionRecord> sessions, const StudyConfig& config,
                           const pipeline::PipelineOptions& options) {
    if (sessions.empty()) throw ConfigError("study " + config.study_id + " has no sessions");
    SummaryReport r;
    r.study_id = config.study_id;
    r.sessions = static_cast<std::int64_t>(sessions.size());

    const auto dups = pipeline::study_duplicates(sessions, config);
    std::int64_t failures = 0, low = 0, keyword = 0, copy_paste = 0, duplicated = 0;
    for (const auto& s : sessions) {
        const auto a = pipeline::assess_session(s, config, &dups, options);
        switch (a.decision) {
            case Decision::pass: ++r.decision_pass; break;
            case Decision::flag: ++r.decision_flag; break;
            case Decision::exclude: ++r.decision_exclude; break;
        }

        bool failed = false;
        std::optional<double> lowest;
        for (const auto& c : s.captcha_scores()) {
            if (config.checkpoint_kind(c.checkpoint_id) == CaptchaKind::challenge) {
                failed = failed || c.score.value() < 0.5;
            } else {
                lowest = std::min(lowest.value_or(1.0), c.score.value());
            }
        }
        failures += failed;
        low += lowest && *lowest < config.policy.captcha_threshold;

        bool hit = false;
        for (const auto& resp : s.responses()) {
            hit = hit || !honeypot::scan_response(resp, config.traps, s.session_id).empty();
        }
        keyword += hit;

        copy_paste += std::any_of(s.events.begin(), s.events.end(), [](const TelemetryEvent& e) {
            const auto* c = std::get_if<ClipboardPayload>(&e.payload);
            return c != nullptr && c->action != ClipboardAction::cut;
        });
        duplicated += std::any_of(dups.signals.begin(), dups.signals.end(),
                                  [&](const DetectionSignal& d) { return d.session_id == s.session_id; });
    }
    r.duplicate_clusters = static_cast<std::int64_t>(dups.clusters.size());

    auto add = [&](std::string_view name, std::int64_t n) {
        r.rows.push_back({std::string(name), n, percent_tenths(n, r.sessions)});
    };
    add(kCaptchaFailures, failures);
    add(kLowCaptcha, low);
    add(kHoneypotKeyword, keyword);
    add(kCopyPaste, copy_paste);
    add(kDuplicateResponses, duplicated);
    return r;
}

nlohmann::ordered_json report_to_json(const SummaryReport& r) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::object();
    for (const auto& row : r.rows) {
        rows[row.category] = {{"count", row.count},
                              {"percent", format_percent(row.count, r.sessions)}};
    }
    nlohmann::ordered_json j;
    j["study"] = r.study_id;
    j["sessions"] = r.sessions;
    j["incidence"] = std::move(rows);
    j["duplicate_clusters"] = r.duplicate_clusters;
    j["decisions"] = {{"pass", r.decision_pass},
                      {"flag", r.decision_flag},
                      {"exclude", r.decision_exclude}};
    return j;
}

std::string render_table(const SummaryReport& r) {
    std::ostringstream out;
    out << "study " << r.study_id << ": " << r.sessions << " sessions\n";
    out << std::left << std::setw(24) << "category" << std::right << std::setw(8) << "count"
        << std::setw(10) << "percent" << "\n";
    for (const auto& row : r.rows) {
        out << std::left << std::setw(24) << row.category << std::right << std::setw(8) << row.count
            << std::setw(10) << format_percent(row.count, r.sessions) << "\n";
    }
    out << "duplicate clusters: " << r.duplicate_clusters << "\n";
    out << "decisions: pass " << r.decision_pass << ", flag " << r.decision_flag << ", exclude "
        << r.decision_exclude << "\n";
    return out.str();
}

}  // namespace sentinel::report
