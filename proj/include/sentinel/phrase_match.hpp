#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel::text {

struct Token {
    std::string word;
    std::size_t begin = 0;  // byte offsets in the tokenized text
    std::size_t end = 0;
};

/// Word tokens: maximal runs of letters, digits and inner apostrophes.
std::vector<Token> tokenize(std::string_view text);

/// Word-level wildcard phrase. `*` matches one to `max_gap` words; every other
/// pattern word must equal the token exactly. Punctuation in the pattern is
/// ignored, so "certainly! here is" matches "Certainly, here is".
class PhrasePattern {
public:
    explicit PhrasePattern(std::string_view pattern, std::size_t max_gap = 6);

    struct Match {
        std::size_t begin = 0;
        std::size_t end = 0;
    };

    /// Leftmost matches, non-overlapping.
    [[nodiscard]] std::vector<Match> find_all(const std::vector<Token>& tokens) const;
    [[nodiscard]] const std::string& source() const { return source_; }

private:
    bool match_from(const std::vector<Token>& tokens, std::size_t tok, std::size_t part,
                    std::size_t& end_tok) const;

    std::string source_;
    std::vector<std::string> parts_;  // "*" for wildcard
    std::size_t max_gap_;
};

}  // namespace sentinel::text
