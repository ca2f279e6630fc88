#include "sentinel/http_api.hpp"

#include "sentinel/report.hpp"
#include "sentinel/scoring.hpp"
#include "sentinel/wire.hpp"

namespace sentinel::service {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

void send(httplib::Response& res, int status, const ojson& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& code, const std::string& detail) {
    send(res, status, error_json(code, detail));
}

json parse_body(const httplib::Request& req) {
    if (req.body.size() > kMaxRequestBytes) {
        throw ServiceError("payload_too_large", "request body exceeds " + std::to_string(kMaxRequestBytes) + " bytes",
                           413);
    }
    try {
        auto j = json::parse(req.body);
        if (!j.is_object()) throw ServiceError("bad_request", "request body must be a JSON object", 400);
        return j;
    } catch (const json::parse_error& e) {
        throw ServiceError("bad_request", std::string("malformed JSON: ") + e.what(), 400);
    }
}

void check_token(const httplib::Request& req, const StudyConfig& cfg) {
    if (cfg.access_token.empty()) return;
    if (req.get_header_value("X-Study-Token") != cfg.access_token) {
        throw ServiceError("unauthorized", "missing or wrong X-Study-Token", 401);
    }
}

/// Runs a handler, mapping every failure onto an {error, detail} body.
template <typename F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ServiceError& e) {
            fail(res, e.status(), e.code(), e.what());
        } catch (const wire::ParseError& e) {
            fail(res, 400, "bad_request", e.what());
        } catch (const std::invalid_argument& e) {
            fail(res, 400, "bad_request", e.what());
        } catch (const json::exception& e) {
            fail(res, 400, "bad_request", e.what());
        } catch (const std::exception& e) {
            fail(res, 500, "internal", e.what());
        }
    };
}

}  // namespace

void install_routes(httplib::Server& server, TelemetryService& service) {
    server.set_payload_max_length(kMaxRequestBytes);

    server.Post("/v1/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const std::string study_id = body.contains("study") ? body.at("study").get<std::string>()
                                                            : body.at("study_id").get<std::string>();
        const auto cfg = service.study(study_id);
        check_token(req, *cfg);
        std::map<std::string, std::string> meta;
        const auto raw_meta = body.value("meta", json::object());
        for (const auto& [k, v] : raw_meta.items()) meta[k] = v.get<std::string>();
        const auto created = service.create_session(study_id, meta);
        ojson out;
        out["sid"] = created.session_id;
        out["study"] = created.study_id;
        out["created_at"] = created.created_at;
        out["traps"] = traps_to_json(cfg->traps);
        out["notice"] = cfg->norms.notice;
        out["affirmation"] = cfg->norms.affirmation;
        send(res, 201, out);
    }));

    server.Post(R"(/v1/sessions/([^/]+)/events)",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const std::string sid = req.matches[1];
                    check_token(req, *service.study_of_session(sid));
                    const auto body = parse_body(req);
                    const auto& raw = body.at("events");
                    if (!raw.is_array()) throw ServiceError("bad_request", "events must be an array", 400);
                    if (raw.size() > kMaxBatchEvents) {
                        throw ServiceError("payload_too_large",
                                           "batch holds " + std::to_string(raw.size()) + " events, limit is " +
                                               std::to_string(kMaxBatchEvents),
                                           413);
                    }
                    std::vector<TelemetryEvent> events;
                    events.reserve(raw.size());
                    for (const auto& e : raw) events.push_back(wire::event_from_json(e));
                    const auto accepted = service.ingest_events(sid, events);
                    const auto snap = service.session(sid);
                    ojson out;
                    out["accepted"] = accepted;
                    if (body.contains("batch_seq")) out["batch_seq"] = body.at("batch_seq");
                    out["high_water"] = snap.events.empty() ? 0 : snap.events.back().seq;
                    send(res, 200, out);
                }));

    server.Post(R"(/v1/sessions/([^/]+)/responses)",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const std::string sid = req.matches[1];
                    check_token(req, *service.study_of_session(sid));
                    const auto body = parse_body(req);
                    if (body.contains("kind") && body.at("kind") != "response_submit") {
                        throw ServiceError("bad_request", "kind must be response_submit", 400);
                    }
                    const auto payload = wire::payload_from_json(EventKind::response_submit, body.at("data"));
                    std::optional<std::int64_t> seq;
                    std::optional<std::int64_t> t;
                    if (body.contains("seq")) seq = body.at("seq").get<std::int64_t>();
                    if (body.contains("t")) t = body.at("t").get<std::int64_t>();
                    const auto assigned =
                        service.submit_response(sid, std::get<ResponsePayload>(payload), seq, t);
                    send(res, 201, ojson{{"seq", assigned}});
                }));

    server.Get(R"(/v1/sessions/([^/]+)/traps)",
               guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   const std::string sid = req.matches[1];
                   const auto cfg = service.study_of_session(sid);
                   check_token(req, *cfg);
                   send(res, 200, ojson{{"sid", sid}, {"traps", traps_to_json(cfg->traps)}});
               }));

    server.Get(R"(/v1/sessions/([^/]+)/assessment)",
               guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   const std::string sid = req.matches[1];
                   check_token(req, *service.study_of_session(sid));
                   send(res, 200, scoring::assessment_to_json(service.get_assessment(sid)));
               }));

    server.Get(R"(/v1/studies/([^/]+)/report)",
               guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   const std::string study = req.matches[1];
                   check_token(req, *service.study(study));
                   send(res, 200, report::report_to_json(service.study_report(study)));
               }));

    // httplib answers oversized bodies and unmatched routes itself; give
    // those the same machine-readable shape.
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        if (res.status == 413) {
            fail(res, 413, "payload_too_large",
                 "request body exceeds " + std::to_string(kMaxRequestBytes) + " bytes");
        } else if (res.status == 404) {
            fail(res, 404, "not_found", "no such endpoint");
        } else {
            fail(res, res.status, "bad_request", "request rejected");
        }
    });
}

}  // namespace sentinel::service
