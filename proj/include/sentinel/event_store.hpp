#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "sentinel/types.hpp"

namespace sentinel::service {

/// Machine-readable failure carried up to the HTTP layer.
class ServiceError : public Error {
public:
    ServiceError(std::string code, const std::string& detail, int status)
        : Error(detail), code_(std::move(code)), status_(status) {}

    [[nodiscard]] const std::string& code() const { return code_; }
    [[nodiscard]] int status() const { return status_; }

private:
    std::string code_;
    int status_;
};

inline constexpr std::size_t kMaxBatchEvents = 500;

/// Append-only per-session event logs. Each session lives in
/// `<root>/sessions/<sid>.ndjson` in canonical form; the in-memory index is
/// rebuilt by replaying those files. Without a root the store is memory-only.
class EventStore {
public:
    explicit EventStore(std::optional<std::filesystem::path> root = std::nullopt);

    EventStore(const EventStore&) = delete;
    EventStore& operator=(const EventStore&) = delete;

    /// Registers a new session header. Throws if the id is taken.
    void create(const SessionRecord& header);

    [[nodiscard]] bool contains(const std::string& session_id) const;

    /// Appends the events that are new, skipping exact re-deliveries. Either
    /// the whole batch is accepted or nothing is written. `check` runs under
    /// the session lock on the fresh events before anything is appended.
    template <typename Check>
    std::size_t append(const std::string& session_id, std::span<const TelemetryEvent> batch, Check&& check);

    std::size_t append(const std::string& session_id, std::span<const TelemetryEvent> batch) {
        return append(session_id, batch, [](const SessionRecord&, std::span<const TelemetryEvent>) {});
    }

    /// Prefix-consistent copy of one session.
    [[nodiscard]] SessionRecord snapshot(const std::string& session_id) const;

    /// Copies of every session of a study, ordered by session id.
    [[nodiscard]] std::vector<SessionRecord> study_snapshot(const std::string& study_id) const;

    [[nodiscard]] std::vector<std::string> session_ids() const;

private:
    struct Entry {
        mutable std::mutex mutex;
        SessionRecord record;
    };

    std::shared_ptr<Entry> find(const std::string& session_id) const;
    /// Splits the batch into fresh events; throws ServiceError on conflicts.
    static std::vector<TelemetryEvent> fresh_events(const SessionRecord& record,
                                                    std::span<const TelemetryEvent> batch);
    void persist(const SessionRecord& record, std::span<const TelemetryEvent> fresh) const;
    void replay();

    std::optional<std::filesystem::path> root_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

template <typename Check>
std::size_t EventStore::append(const std::string& session_id, std::span<const TelemetryEvent> batch,
                               Check&& check) {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    auto fresh = fresh_events(entry->record, batch);
    if (fresh.empty()) return 0;
    check(static_cast<const SessionRecord&>(entry->record), std::span<const TelemetryEvent>(fresh));
    persist(entry->record, fresh);
    entry->record.events.insert(entry->record.events.end(), fresh.begin(), fresh.end());
    return fresh.size();
}

}  // namespace sentinel::service
