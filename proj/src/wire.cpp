#include "sentinel/wire.hpp"

#include <set>

namespace sentinel::wire {

using nlohmann::json;

ParseError::ParseError(std::size_t offset, std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ", byte " + std::to_string(offset) + ": " + what),
      offset_(offset),
      line_(line) {}

namespace {

void expect_keys(const json& data, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional = {}) {
    if (!data.is_object()) throw std::invalid_argument("data must be an object");
    std::set<std::string> allowed;
    for (const char* k : required) {
        if (!data.contains(k)) throw std::invalid_argument(std::string("data.") + k + " missing");
        allowed.insert(k);
    }
    for (const char* k : optional) allowed.insert(k);
    for (const auto& [k, v] : data.items()) {
        if (allowed.count(k) == 0) throw std::invalid_argument("unexpected field data." + k);
    }
}

std::string get_string(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw std::invalid_argument(std::string(key) + " must be a string");
    return v.get<std::string>();
}

std::int64_t get_int(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw std::invalid_argument(std::string(key) + " must be an integer");
    return v.get<std::int64_t>();
}

double get_number(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
    return v.get<double>();
}

bool get_bool(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_boolean()) throw std::invalid_argument(std::string(key) + " must be a boolean");
    return v.get<bool>();
}

template <typename E>
E get_enum(const json& j, const char* key, std::optional<E> (*parse)(std::string_view)) {
    const auto s = get_string(j, key);
    auto v = parse(s);
    if (!v) throw std::invalid_argument(std::string(key) + ": unknown value '" + s + "'");
    return *v;
}

}  // namespace

ojson header_to_json(const SessionRecord& s) {
    ojson meta = ojson::object();
    for (const auto& [k, v] : s.client_meta) meta[k] = v;
    ojson h;
    h["v"] = 1;
    h["sid"] = s.session_id;
    h["study"] = s.study_id;
    h["created_at"] = s.created_at;
    h["meta"] = std::move(meta);
    return h;
}

ojson data_to_json(const TelemetryEvent& e) {
    ojson d = ojson::object();
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, KeyPayload>) {
                d["key"] = p.key;
            } else if constexpr (std::is_same_v<P, MousePayload>) {
                d["x"] = p.x;
                d["y"] = p.y;
            } else if constexpr (std::is_same_v<P, VisibilityPayload>) {
                d["state"] = p.hidden ? "hidden" : "visible";
            } else if constexpr (std::is_same_v<P, ClipboardPayload>) {
                d["action"] = to_string(p.action);
                d["length"] = p.length;
                if (p.text) d["text"] = *p.text;
                d["blocked"] = p.blocked;
            } else if constexpr (std::is_same_v<P, TrapPayload>) {
                d["trap_id"] = p.trap_id;
            } else if constexpr (std::is_same_v<P, SpeechPayload>) {
                d["text"] = p.text;
            } else if constexpr (std::is_same_v<P, CaptchaPayload>) {
                d["checkpoint_id"] = p.checkpoint_id;
                d["score"] = p.score.value();
            } else if constexpr (std::is_same_v<P, ResponsePayload>) {
                d["item_id"] = p.item_id;
                d["text"] = p.text;
                d["input_mode"] = to_string(p.input_mode);
            } else if constexpr (std::is_same_v<P, AffirmationPayload>) {
                d["granted"] = p.granted;
            }
        },
        e.payload);
    return d;
}

ojson event_to_json(const TelemetryEvent& e) {
    ojson j;
    j["seq"] = e.seq;
    j["t"] = e.t_ms;
    j["kind"] = to_string(e.kind);
    j["data"] = data_to_json(e);
    return j;
}

Payload payload_from_json(EventKind kind, const json& d) {
    switch (kind) {
        case EventKind::key_down:
        case EventKind::key_up:
            expect_keys(d, {"key"});
            return KeyPayload{get_string(d, "key")};
        case EventKind::mouse_move:
            expect_keys(d, {"x", "y"});
            return MousePayload{get_number(d, "x"), get_number(d, "y")};
        case EventKind::visibility: {
            expect_keys(d, {"state"});
            const auto s = get_string(d, "state");
            if (s != "hidden" && s != "visible") {
                throw std::invalid_argument("state must be hidden or visible");
            }
            return VisibilityPayload{s == "hidden"};
        }
        case EventKind::clipboard: {
            expect_keys(d, {"action", "length", "blocked"}, {"text"});
            ClipboardPayload p;
            p.action = get_enum<ClipboardAction>(d, "action", parse_clipboard_action);
            p.length = get_int(d, "length");
            if (d.contains("text")) p.text = get_string(d, "text");
            p.blocked = get_bool(d, "blocked");
            return p;
        }
        case EventKind::trap_interaction:
            expect_keys(d, {"trap_id"});
            return TrapPayload{get_string(d, "trap_id")};
        case EventKind::speech_transcript:
            expect_keys(d, {"text"});
            return SpeechPayload{get_string(d, "text")};
        case EventKind::captcha_score:
            expect_keys(d, {"checkpoint_id", "score"});
            return CaptchaPayload{get_string(d, "checkpoint_id"), Unit(get_number(d, "score"))};
        case EventKind::response_submit:
            expect_keys(d, {"item_id", "text", "input_mode"});
            return ResponsePayload{get_string(d, "item_id"), get_string(d, "text"),
                                   get_enum<InputMode>(d, "input_mode", parse_input_mode)};
        case EventKind::affirmation:
            expect_keys(d, {"granted"});
            return AffirmationPayload{get_bool(d, "granted")};
    }
    throw std::invalid_argument("unknown kind");
}

TelemetryEvent event_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("event must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k != "seq" && k != "t" && k != "kind" && k != "data") {
            throw std::invalid_argument("unexpected field " + k);
        }
    }
    TelemetryEvent e;
    e.seq = get_int(j, "seq");
    e.t_ms = get_int(j, "t");
    e.kind = get_enum<EventKind>(j, "kind", parse_event_kind);
    if (!j.contains("data")) throw std::invalid_argument("data missing");
    e.payload = payload_from_json(e.kind, j.at("data"));
    return e;
}

std::string dump_line(const ojson& j) {
    return j.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

std::string canonical_encode(const SessionRecord& s) {
    std::string out = dump_line(header_to_json(s));
    out += '\n';
    for (const auto& e : s.events) {
        out += dump_line(event_to_json(e));
        out += '\n';
    }
    return out;
}

namespace {

struct Line {
    std::string_view text;
    std::size_t offset;
    std::size_t number;
};

std::vector<Line> split_lines(std::string_view bytes) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    std::size_t number = 1;
    while (pos < bytes.size()) {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos) {
            throw ParseError(bytes.size(), number, "truncated input: line has no terminator");
        }
        lines.push_back({bytes.substr(pos, nl - pos), pos, number});
        pos = nl + 1;
        ++number;
    }
    return lines;
}

json parse_line(const Line& l) {
    try {
        return json::parse(l.text);
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte == 0 ? 0 : e.byte - 1;
        throw ParseError(l.offset + std::min(at, l.text.size()), l.number,
                         std::string("malformed JSON: ") + e.what());
    }
}

bool is_header(const json& j) { return j.is_object() && j.contains("v"); }

SessionRecord header_from_json(const json& j, const Line& l) {
    try {
        for (const auto& [k, v] : j.items()) {
            if (k != "v" && k != "sid" && k != "study" && k != "created_at" && k != "meta") {
                throw std::invalid_argument("unexpected header field " + k);
            }
        }
        if (get_int(j, "v") != 1) throw std::invalid_argument("unsupported version");
        SessionRecord s;
        s.session_id = get_string(j, "sid");
        s.study_id = get_string(j, "study");
        s.created_at = get_int(j, "created_at");
        const auto& meta = j.at("meta");
        if (!meta.is_object()) throw std::invalid_argument("meta must be an object");
        for (const auto& [k, v] : meta.items()) {
            if (!v.is_string()) throw std::invalid_argument("meta." + k + " must be a string");
            s.client_meta[k] = v.get<std::string>();
        }
        return s;
    } catch (const std::exception& e) {
        throw ParseError(l.offset, l.number, std::string("bad session header: ") + e.what());
    }
}

TelemetryEvent event_from_line(const json& j, const Line& l) {
    try {
        return event_from_json(j);
    } catch (const std::exception& e) {
        throw ParseError(l.offset, l.number, std::string("bad event: ") + e.what());
    }
}

}  // namespace

SessionRecord canonical_decode(std::string_view bytes) {
    const auto lines = split_lines(bytes);
    if (lines.empty()) throw ParseError(0, 1, "missing session header");
    const json h = parse_line(lines.front());
    if (!is_header(h)) throw ParseError(0, 1, "first line is not a session header");
    SessionRecord s = header_from_json(h, lines.front());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const json j = parse_line(lines[i]);
        if (is_header(j)) throw ParseError(lines[i].offset, lines[i].number, "second session header");
        s.events.push_back(event_from_line(j, lines[i]));
    }
    return s;
}

std::vector<SessionRecord> decode_stream(std::string_view bytes) {
    std::vector<SessionRecord> out;
    for (const auto& l : split_lines(bytes)) {
        if (l.text.empty()) continue;
        const json j = parse_line(l);
        if (is_header(j)) {
            out.push_back(header_from_json(j, l));
        } else if (out.empty()) {
            throw ParseError(l.offset, l.number, "event before any session header");
        } else {
            out.back().events.push_back(event_from_line(j, l));
        }
    }
    return out;
}

}  // namespace sentinel::wire
