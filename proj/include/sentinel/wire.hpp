#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/types.hpp"

namespace sentinel::wire {

/// Malformed canonical input. `offset` is the byte offset into the decoded
/// buffer, `line` the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::size_t line, const std::string& what);

    [[nodiscard]] std::size_t offset() const { return offset_; }
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t offset_;
    std::size_t line_;
};

using ojson = nlohmann::ordered_json;

ojson header_to_json(const SessionRecord& s);
ojson event_to_json(const TelemetryEvent& e);
ojson data_to_json(const TelemetryEvent& e);

/// Throws std::invalid_argument naming the offending field.
TelemetryEvent event_from_json(const nlohmann::json& j);
/// Builds a payload for `kind` from its data object; rejects missing or extra keys.
Payload payload_from_json(EventKind kind, const nlohmann::json& data);

/// Single line, no terminator.
std::string dump_line(const ojson& j);

/// Newline-delimited canonical session: header line, then one line per event.
std::string canonical_encode(const SessionRecord& s);
SessionRecord canonical_decode(std::string_view bytes);

/// Several sessions concatenated; every header line starts a new session.
std::vector<SessionRecord> decode_stream(std::string_view bytes);

}  // namespace sentinel::wire
