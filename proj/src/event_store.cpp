#include "sentinel/event_store.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sentinel/wire.hpp"

namespace sentinel::service {

namespace fs = std::filesystem;

namespace {

bool safe_id(const std::string& id) {
    if (id.empty() || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) != 0 || c == '-' || c == '_' || c == '.';
    }) && id.front() != '.';
}

}  // namespace

EventStore::EventStore(std::optional<fs::path> root) : root_(std::move(root)) {
    if (root_) {
        fs::create_directories(*root_ / "sessions");
        replay();
    }
}

void EventStore::replay() {
    for (const auto& f : fs::directory_iterator(*root_ / "sessions")) {
        if (!f.is_regular_file() || f.path().extension() != ".ndjson") continue;
        std::string bytes;
        {
            std::ifstream in(f.path(), std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            bytes = ss.str();
        }
        // A crash mid-append leaves an unterminated tail; drop it for good.
        const auto end = bytes.rfind('\n');
        const std::size_t keep = end == std::string::npos ? 0 : end + 1;
        if (keep != bytes.size()) {
            bytes.resize(keep);
            fs::resize_file(f.path(), keep);
        }
        if (bytes.empty()) continue;
        SessionRecord rec;
        try {
            rec = wire::canonical_decode(bytes);
        } catch (const wire::ParseError& e) {
            throw Error("event log " + f.path().string() + " line " + std::to_string(e.line()) + ": " +
                        e.what());
        }
        auto entry = std::make_shared<Entry>();
        entry->record = std::move(rec);
        sessions_[entry->record.session_id] = std::move(entry);
    }
}

void EventStore::create(const SessionRecord& header) {
    if (!safe_id(header.session_id)) {
        throw ServiceError("bad_request", "session id '" + header.session_id + "' is not allowed", 400);
    }
    std::unique_lock lock(map_mutex_);
    if (sessions_.count(header.session_id) != 0) {
        throw ServiceError("bad_request", "session " + header.session_id + " already exists", 400);
    }
    auto entry = std::make_shared<Entry>();
    entry->record = header;
    entry->record.events.clear();
    if (root_) {
        std::ofstream out(*root_ / "sessions" / (header.session_id + ".ndjson"), std::ios::binary | std::ios::trunc);
        out << wire::dump_line(wire::header_to_json(entry->record)) << '\n';
        out.flush();
        if (!out) throw Error("cannot write event log for " + header.session_id);
    }
    sessions_[header.session_id] = std::move(entry);
}

bool EventStore::contains(const std::string& session_id) const {
    std::shared_lock lock(map_mutex_);
    return sessions_.count(session_id) != 0;
}

std::shared_ptr<EventStore::Entry> EventStore::find(const std::string& session_id) const {
    std::shared_lock lock(map_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw ServiceError("unknown_session", "no session " + session_id, 404);
    return it->second;
}

std::vector<TelemetryEvent> EventStore::fresh_events(const SessionRecord& record,
                                                     std::span<const TelemetryEvent> batch) {
    if (batch.size() > kMaxBatchEvents) {
        throw ServiceError("payload_too_large",
                           "batch holds " + std::to_string(batch.size()) + " events, limit is " +
                               std::to_string(kMaxBatchEvents),
                           413);
    }
    const auto& stored = record.events;
    const std::int64_t high_water = stored.empty() ? 0 : stored.back().seq;
    std::int64_t last_t = stored.empty() ? 0 : stored.back().t_ms;
    std::int64_t prev_seq = 0;
    std::vector<TelemetryEvent> fresh;
    for (const auto& e : batch) {
        if (e.seq <= prev_seq) {
            throw ServiceError("bad_request", "batch seq " + std::to_string(e.seq) + " is not increasing", 400);
        }
        prev_seq = e.seq;
        auto it = std::lower_bound(stored.begin(), stored.end(), e.seq,
                                   [](const TelemetryEvent& s, std::int64_t q) { return s.seq < q; });
        if (it != stored.end() && it->seq == e.seq) {
            if (*it == e) continue;
            throw ServiceError("seq_conflict", "seq " + std::to_string(e.seq) + " already stored with a different payload", 409);
        }
        if (e.seq < high_water) {
            throw ServiceError("seq_conflict",
                               "seq " + std::to_string(e.seq) + " is below the high-water mark " +
                                   std::to_string(high_water),
                               409);
        }
        if (e.t_ms < last_t) {
            throw ServiceError("bad_request", "seq " + std::to_string(e.seq) + " moves t backwards", 400);
        }
        last_t = e.t_ms;
        fresh.push_back(e);
    }
    return fresh;
}

void EventStore::persist(const SessionRecord& record, std::span<const TelemetryEvent> fresh) const {
    if (!root_) return;
    std::string block;
    for (const auto& e : fresh) {
        block += wire::dump_line(wire::event_to_json(e));
        block += '\n';
    }
    std::ofstream out(*root_ / "sessions" / (record.session_id + ".ndjson"), std::ios::binary | std::ios::app);
    out << block;
    out.flush();
    if (!out) throw Error("cannot append to event log for " + record.session_id);
}

SessionRecord EventStore::snapshot(const std::string& session_id) const {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    return entry->record;
}

std::vector<SessionRecord> EventStore::study_snapshot(const std::string& study_id) const {
    std::vector<std::shared_ptr<Entry>> entries;
    {
        std::shared_lock lock(map_mutex_);
        for (const auto& [id, e] : sessions_) entries.push_back(e);
    }
    std::vector<SessionRecord> out;
    for (const auto& e : entries) {
        std::lock_guard lock(e->mutex);
        if (e->record.study_id == study_id) out.push_back(e->record);
    }
    return out;
}

std::vector<std::string> EventStore::session_ids() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, e] : sessions_) out.push_back(id);
    return out;
}

}  // namespace sentinel::service
