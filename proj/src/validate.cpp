#include "sentinel/validate.hpp"

#include <set>

#include "sentinel/unicode.hpp"

namespace sentinel {

std::string describe(const Violation& v) {
    std::string out = v.field;
    if (v.seq) out += " (seq " + std::to_string(*v.seq) + ")";
    return out + ": " + v.message;
}

std::vector<Violation> validate_session(const SessionRecord& record, const StudyConfig* config) {
    std::vector<Violation> out;
    if (record.session_id.empty()) out.push_back({"session_id", std::nullopt, "empty"});

    const std::size_t max_chars = config ? config->max_response_chars : kDefaultMaxResponseChars;
    std::optional<std::int64_t> last_seq;
    std::optional<std::int64_t> last_t;
    std::set<std::string> answered;

    for (const auto& e : record.events) {
        if (e.seq <= 0) out.push_back({"seq", e.seq, "sequence numbers must be positive"});
        if (last_seq && e.seq <= *last_seq) {
            out.push_back({"seq", e.seq,
                           "not strictly greater than preceding seq " + std::to_string(*last_seq)});
        }
        if (last_t && e.t_ms < *last_t) {
            out.push_back({"t", e.seq, "timestamp decreases from " + std::to_string(*last_t)});
        }
        if (e.t_ms < 0) out.push_back({"t", e.seq, "negative timestamp"});
        last_seq = e.seq;
        last_t = e.t_ms;

        if (!payload_matches(e.kind, e.payload)) {
            out.push_back({"data", e.seq, "payload does not match kind " + std::string(to_string(e.kind))});
            continue;
        }
        if (const auto* c = std::get_if<ClipboardPayload>(&e.payload)) {
            if (c->length < 0) out.push_back({"data.length", e.seq, "negative clipboard length"});
            if (c->text) {
                const auto n = text::codepoint_count(*c->text);
                if (n > kClipboardTextCap) {
                    out.push_back({"data.text", e.seq,
                                   "clipboard text of " + std::to_string(n) +
                                       " chars exceeds the 1000-char cap"});
                }
                if (static_cast<std::int64_t>(n) > c->length) {
                    out.push_back({"data.length", e.seq, "shorter than the retained text"});
                }
            }
        } else if (const auto* r = std::get_if<ResponsePayload>(&e.payload)) {
            if (text::codepoint_count(r->text) > max_chars) {
                out.push_back({"data.text", e.seq,
                               "response exceeds " + std::to_string(max_chars) + " chars"});
            }
            if (!answered.insert(r->item_id).second) {
                out.push_back({"data.item_id", e.seq, "duplicate response to " + r->item_id});
            }
            if (config && config->find_item(r->item_id) == nullptr) {
                out.push_back({"data.item_id", e.seq, "undeclared item " + r->item_id});
            }
        } else if (const auto* k = std::get_if<KeyPayload>(&e.payload)) {
            if (k->key.empty()) out.push_back({"data.key", e.seq, "empty key label"});
        }
    }
    if (config && !record.study_id.empty() && record.study_id != config->study_id) {
        out.push_back({"study", std::nullopt,
                       "session belongs to " + record.study_id + ", not " + config->study_id});
    }
    return out;
}

}  // namespace sentinel
