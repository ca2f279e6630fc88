#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sentinel/types.hpp"

namespace fixtures {

/// Appends events with consecutive seqs.
class Builder {
public:
    explicit Builder(std::string sid = "s1", std::string study = "demo-study") {
        rec_.session_id = std::move(sid);
        rec_.study_id = std::move(study);
        rec_.created_at = 1750000000000;
    }

    Builder& add(sentinel::TelemetryEvent e) {
        e.seq = ++seq_;
        rec_.events.push_back(std::move(e));
        return *this;
    }

    Builder& key(std::int64_t t, const std::string& k) {
        add(sentinel::TelemetryEvent::key_down(0, t, k));
        return add(sentinel::TelemetryEvent::key_up(0, t + 20, k));
    }

    Builder& type(std::int64_t& t, const std::string& text, std::int64_t step = 150) {
        for (char c : text) {
            key(t, std::string(1, c));
            t += step;
        }
        return *this;
    }

    Builder& respond(std::int64_t t, const std::string& item, const std::string& text,
                     sentinel::InputMode mode = sentinel::InputMode::typed) {
        return add(sentinel::TelemetryEvent::response_submit(0, t, {item, text, mode}));
    }

    Builder& captcha(std::int64_t t, const std::string& checkpoint, double score) {
        return add(sentinel::TelemetryEvent::captcha_score(0, t, checkpoint, sentinel::Unit(score)));
    }

    [[nodiscard]] sentinel::SessionRecord build() const { return rec_; }

private:
    sentinel::SessionRecord rec_;
    std::int64_t seq_ = 0;
};

/// Textbook full-matrix edit distance.
inline std::size_t dp_levenshtein(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    }
    return d[a.size()][b.size()];
}

/// Whole-word occurrences of an ASCII keyword in ASCII text, by scanning
/// every start position and looking at both neighbours.
inline std::vector<std::size_t> word_starts(const std::string& text, const std::string& word) {
    auto is_word = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    };
    auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
    std::vector<std::size_t> out;
    if (word.empty() || text.size() < word.size()) return out;
    for (std::size_t i = 0; i + word.size() <= text.size(); ++i) {
        bool eq = true;
        for (std::size_t k = 0; k < word.size() && eq; ++k) eq = lower(text[i + k]) == word[k];
        if (!eq) continue;
        const bool left_ok = i == 0 || !is_word(text[i - 1]);
        const bool right_ok = i + word.size() == text.size() || !is_word(text[i + word.size()]);
        if (left_ok && right_ok) out.push_back(i);
    }
    return out;
}

}  // namespace fixtures
