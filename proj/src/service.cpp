#include "sentinel/service.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "sentinel/honeypot.hpp"

namespace sentinel::service {

namespace fs = std::filesystem;

namespace {

std::int64_t system_now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::function<std::string()> random_ids() {
    auto rng = std::make_shared<std::mt19937_64>(std::random_device{}());
    return [rng] {
        char buf[24];
        std::snprintf(buf, sizeof buf, "s-%016llx", static_cast<unsigned long long>((*rng)()));
        return std::string(buf);
    };
}

}  // namespace

nlohmann::ordered_json error_json(const std::string& code, const std::string& detail) {
    return {{"error", code}, {"detail", detail}};
}

nlohmann::ordered_json traps_to_json(std::span<const TrapSpec> traps) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& t : traps) {
        nlohmann::ordered_json j;
        j["trap_id"] = t.trap_id;
        j["technique"] = std::string(to_string(t.technique));
        j["target_item_id"] = t.target_item_id;
        if (is_text_technique(t.technique)) {
            j["keyword"] = t.keyword;
            j["instruction_text"] = t.instruction_text;
        } else {
            j["label_text"] = t.label_text;
        }
        j["style_directive"] = t.style_directive;
        j["html"] = honeypot::render_directives(t).to_html();
        out.push_back(std::move(j));
    }
    return out;
}

TelemetryService::TelemetryService(ServiceOptions options) : options_(std::move(options)) {
    if (!options_.clock) options_.clock = system_now_ms;
    if (!options_.id_generator) options_.id_generator = random_ids();
    store_ = std::make_unique<EventStore>(options_.data_dir);
    if (options_.data_dir) load_studies();
}

void TelemetryService::load_studies() {
    const auto dir = *options_.data_dir / "studies";
    if (!fs::exists(dir)) return;
    for (const auto& f : fs::directory_iterator(dir)) {
        if (!f.is_regular_file() || f.path().extension() != ".json") continue;
        auto cfg = std::make_shared<StudyConfig>(load_study_config(f.path()));
        studies_[cfg->study_id] = std::move(cfg);
    }
}

void TelemetryService::register_study(StudyConfig config) {
    finalize_study_config(config);
    if (options_.data_dir) {
        const auto dir = *options_.data_dir / "studies";
        fs::create_directories(dir);
        std::ofstream out(dir / (config.study_id + ".json"), std::ios::binary | std::ios::trunc);
        out << dump_study_config(config) << '\n';
        if (!out) throw Error("cannot write study config for " + config.study_id);
    }
    std::unique_lock lock(studies_mutex_);
    auto id = config.study_id;
    studies_[id] = std::make_shared<const StudyConfig>(std::move(config));
}

std::shared_ptr<const StudyConfig> TelemetryService::study(const std::string& study_id) const {
    std::shared_lock lock(studies_mutex_);
    auto it = studies_.find(study_id);
    if (it == studies_.end()) throw ServiceError("unknown_study", "no study " + study_id, 404);
    return it->second;
}

std::shared_ptr<const StudyConfig> TelemetryService::study_of_session(const std::string& session_id) const {
    return study(store_->snapshot(session_id).study_id);
}

CreatedSession TelemetryService::create_session(const std::string& study_id,
                                                const std::map<std::string, std::string>& client_meta) {
    const auto cfg = study(study_id);
    SessionRecord header;
    header.study_id = study_id;
    header.client_meta = client_meta;
    header.created_at = options_.clock();
    {
        std::lock_guard lock(id_mutex_);
        do {
            header.session_id = options_.id_generator();
        } while (store_->contains(header.session_id));
        store_->create(header);
    }
    return {header.session_id, header.created_at, study_id};
}

void TelemetryService::check_responses(const StudyConfig& cfg, const SessionRecord& stored,
                                       std::span<const TelemetryEvent> fresh) const {
    std::set<std::string> seen;
    for (const auto& r : stored.responses()) seen.insert(r.item_id);
    for (const auto& e : fresh) {
        const auto* r = std::get_if<ResponsePayload>(&e.payload);
        if (r == nullptr) continue;
        if (cfg.find_item(r->item_id) == nullptr) {
            throw ServiceError("unknown_item", "item " + r->item_id + " is not declared in study " + cfg.study_id, 400);
        }
        if (!seen.insert(r->item_id).second) {
            throw ServiceError("duplicate_response", "item " + r->item_id + " already has a response", 409);
        }
    }
}

std::size_t TelemetryService::ingest_events(const std::string& session_id,
                                            std::span<const TelemetryEvent> events) {
    const auto cfg = study_of_session(session_id);
    return store_->append(session_id, events,
                          [&](const SessionRecord& stored, std::span<const TelemetryEvent> fresh) {
                              check_responses(*cfg, stored, fresh);
                          });
}

std::int64_t TelemetryService::submit_response(const std::string& session_id, const ResponsePayload& response,
                                               std::optional<std::int64_t> seq,
                                               std::optional<std::int64_t> t_ms) {
    const auto cfg = study_of_session(session_id);
    // Auto-assigned seqs can race with concurrent ingest; retry on a lost race.
    for (int attempt = 0;; ++attempt) {
        const auto snap = store_->snapshot(session_id);
        const std::int64_t last_seq = snap.events.empty() ? 0 : snap.events.back().seq;
        const std::int64_t last_t = snap.events.empty() ? 0 : snap.events.back().t_ms;
        const auto event = TelemetryEvent::response_submit(seq.value_or(last_seq + 1),
                                                           t_ms.value_or(last_t), response);
        try {
            store_->append(session_id, std::span(&event, 1),
                           [&](const SessionRecord& stored, std::span<const TelemetryEvent> fresh) {
                               check_responses(*cfg, stored, fresh);
                           });
            return event.seq;
        } catch (const ServiceError& e) {
            if (seq || e.code() != "seq_conflict" || attempt >= 8) throw;
        }
    }
}

std::vector<TrapSpec> TelemetryService::traps(const std::string& session_id) const {
    return study_of_session(session_id)->traps;
}

PollutionAssessment TelemetryService::get_assessment(const std::string& session_id) const {
    const auto target = store_->snapshot(session_id);
    const auto cfg = study(target.study_id);
    auto peers = store_->study_snapshot(target.study_id);
    // The target snapshot is authoritative; peers only feed clustering.
    for (auto& p : peers) {
        if (p.session_id == session_id) p = target;
    }
    const auto dups = pipeline::study_duplicates(peers, *cfg);
    return pipeline::assess_session(target, *cfg, &dups, {options_.external});
}

report::SummaryReport TelemetryService::study_report(const std::string& study_id) const {
    const auto cfg = study(study_id);
    const auto sessions = store_->study_snapshot(study_id);
    if (sessions.empty()) throw ServiceError("unknown_study", "study " + study_id + " has no sessions", 404);
    return report::study_report(sessions, *cfg, {options_.external});
}

SessionRecord TelemetryService::session(const std::string& session_id) const {
    return store_->snapshot(session_id);
}

}  // namespace sentinel::service
