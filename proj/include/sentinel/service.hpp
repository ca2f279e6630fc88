#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/event_store.hpp"
#include "sentinel/pipeline.hpp"
#include "sentinel/report.hpp"
#include "sentinel/types.hpp"

namespace sentinel::service {

struct ServiceOptions {
    /// Root for `sessions/` and `studies/`; memory-only when empty.
    std::optional<std::filesystem::path> data_dir;
    /// Milliseconds since the epoch; defaults to the system clock.
    std::function<std::int64_t()> clock;
    /// Fresh session ids; defaults to random hex.
    std::function<std::string()> id_generator;
    const screening::AiTextDetector* external = nullptr;
};

struct CreatedSession {
    std::string session_id;
    std::int64_t created_at = 0;
    std::string study_id;
};

class TelemetryService {
public:
    explicit TelemetryService(ServiceOptions options = {});

    /// Adds or replaces a study. With a data directory the config is also
    /// written to `studies/<id>.json` so offline tools can find it.
    void register_study(StudyConfig config);

    /// Throws ServiceError(unknown_study).
    [[nodiscard]] std::shared_ptr<const StudyConfig> study(const std::string& study_id) const;
    [[nodiscard]] std::shared_ptr<const StudyConfig> study_of_session(const std::string& session_id) const;

    CreatedSession create_session(const std::string& study_id,
                                  const std::map<std::string, std::string>& client_meta = {});

    /// Number of newly stored events. Re-deliveries are ignored; conflicts,
    /// unknown items and duplicate responses reject the whole batch.
    std::size_t ingest_events(const std::string& session_id, std::span<const TelemetryEvent> events);

    /// Appends a response_submit event and returns its seq. Without `seq` the
    /// next free seq is used; without `t_ms` the last event time.
    std::int64_t submit_response(const std::string& session_id, const ResponsePayload& response,
                                 std::optional<std::int64_t> seq = std::nullopt,
                                 std::optional<std::int64_t> t_ms = std::nullopt);

    [[nodiscard]] std::vector<TrapSpec> traps(const std::string& session_id) const;

    /// Full pipeline over a snapshot; duplicate clustering spans the study.
    [[nodiscard]] PollutionAssessment get_assessment(const std::string& session_id) const;

    [[nodiscard]] report::SummaryReport study_report(const std::string& study_id) const;

    [[nodiscard]] SessionRecord session(const std::string& session_id) const;

    [[nodiscard]] const EventStore& store() const { return *store_; }

private:
    void check_responses(const StudyConfig& cfg, const SessionRecord& stored,
                         std::span<const TelemetryEvent> fresh) const;
    void load_studies();

    ServiceOptions options_;
    std::unique_ptr<EventStore> store_;
    mutable std::shared_mutex studies_mutex_;
    std::map<std::string, std::shared_ptr<const StudyConfig>> studies_;
    std::mutex id_mutex_;
};

/// Trap specs plus their rendered markup, as served to the probe.
nlohmann::ordered_json traps_to_json(std::span<const TrapSpec> traps);

/// `{error, detail}` body for a failure code.
nlohmann::ordered_json error_json(const std::string& code, const std::string& detail);

}  // namespace sentinel::service
