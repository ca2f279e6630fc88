#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/config.hpp"
#include "sentinel/types.hpp"

namespace sentinel {

inline constexpr std::size_t kClipboardTextCap = 1000;
inline constexpr std::size_t kDefaultMaxResponseChars = 20000;

struct Violation {
    std::string field;
    std::optional<std::int64_t> seq;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::string describe(const Violation& v);

/// Reports every broken SessionRecord invariant; never throws. With a config,
/// responses are also checked against the declared items and length cap.
std::vector<Violation> validate_session(const SessionRecord& record,
                                        const StudyConfig* config = nullptr);

}  // namespace sentinel
