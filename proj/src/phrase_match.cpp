#include "sentinel/phrase_match.hpp"

#include "sentinel/unicode.hpp"

namespace sentinel::text {

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    const std::u32string cps = to_u32(text);
    std::size_t byte = 0;
    Token cur;
    bool in_word = false;
    auto flush = [&] {
        // trailing apostrophes belong to punctuation, not the word
        while (!cur.word.empty() && cur.word.back() == '\'') {
            cur.word.pop_back();
            --cur.end;
        }
        if (!cur.word.empty()) tokens.push_back(cur);
        cur = Token{};
        in_word = false;
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t c = cps[i];
        const std::string enc = to_utf8(std::u32string_view(&cps[i], 1));
        const bool apostrophe = (c == U'\'' || c == U'’') && in_word;
        if (is_word_char(c) || apostrophe) {
            if (!in_word) {
                cur.begin = byte;
                in_word = true;
            }
            cur.word += apostrophe ? std::string("'") : enc;
            cur.end = byte + enc.size();
        } else if (in_word) {
            flush();
        }
        byte += enc.size();
    }
    if (in_word) flush();
    return tokens;
}

PhrasePattern::PhrasePattern(std::string_view pattern, std::size_t max_gap)
    : source_(pattern), max_gap_(max_gap) {
    const std::string norm = normalize_text(pattern);
    std::string word;
    for (std::size_t i = 0; i <= norm.size(); ++i) {
        if (i == norm.size() || norm[i] == ' ') {
            if (word == "*") {
                parts_.push_back("*");
            } else {
                for (const auto& t : tokenize(word)) parts_.push_back(t.word);
            }
            word.clear();
        } else {
            word += norm[i];
        }
    }
}

bool PhrasePattern::match_from(const std::vector<Token>& tokens, std::size_t tok,
                               std::size_t part, std::size_t& end_tok) const {
    if (part == parts_.size()) {
        end_tok = tok;
        return true;
    }
    if (parts_[part] == "*") {
        for (std::size_t gap = 1; gap <= max_gap_ && tok + gap <= tokens.size(); ++gap) {
            if (match_from(tokens, tok + gap, part + 1, end_tok)) return true;
        }
        return false;
    }
    if (tok >= tokens.size() || tokens[tok].word != parts_[part]) return false;
    return match_from(tokens, tok + 1, part + 1, end_tok);
}

std::vector<PhrasePattern::Match> PhrasePattern::find_all(const std::vector<Token>& tokens) const {
    std::vector<Match> out;
    if (parts_.empty()) return out;
    for (std::size_t i = 0; i < tokens.size();) {
        std::size_t end_tok = 0;
        if (match_from(tokens, i, 0, end_tok) && end_tok > i) {
            out.push_back({tokens[i].begin, tokens[end_tok - 1].end});
            i = end_tok;
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace sentinel::text
