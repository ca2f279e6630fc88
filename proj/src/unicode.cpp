#include "sentinel/unicode.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace sentinel::text {

namespace {

const icu::Normalizer2& nfc_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || n == nullptr) throw std::runtime_error("ICU NFC unavailable");
    return *n;
}

std::string to_std(const icu::UnicodeString& u) {
    std::string out;
    u.toUTF8String(out);
    return out;
}

}  // namespace

std::string nfc(std::string_view utf8) {
    auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    UErrorCode status = U_ZERO_ERROR;
    auto out = nfc_instance().normalize(src, status);
    if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
    return to_std(out);
}

std::string lowercase(std::string_view utf8) {
    auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    u.toLower(icu::Locale::getRoot());
    return to_std(u);
}

std::string normalize_text(std::string_view s) {
    // Lowercasing can denormalize (e.g. final sigma contexts), so NFC runs last.
    std::u32string lowered = to_u32(nfc(lowercase(nfc(s))));
    std::u32string collapsed;
    collapsed.reserve(lowered.size());
    bool pending_space = false;
    for (char32_t c : lowered) {
        if (is_space(c)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) collapsed.push_back(U' ');
        pending_space = false;
        collapsed.push_back(c);
    }
    return to_utf8(collapsed);
}

std::u32string to_u32(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    const auto* p = reinterpret_cast<const uint8_t*>(utf8.data());
    int32_t i = 0;
    const auto len = static_cast<int32_t>(utf8.size());
    while (i < len) {
        UChar32 c;
        U8_NEXT(p, i, len, c);
        out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
    }
    return out;
}

std::string to_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) {
        uint8_t buf[4];
        int32_t n = 0;
        UBool err = false;
        U8_APPEND(buf, n, 4, static_cast<UChar32>(c), err);
        if (err) {
            out += "\xEF\xBF\xBD";
        } else {
            out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
        }
    }
    return out;
}

std::size_t codepoint_count(std::string_view utf8) {
    std::size_t n = 0;
    for (unsigned char c : utf8) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

bool is_word_char(char32_t c) { return u_isalnum(static_cast<UChar32>(c)) != 0; }

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }

}  // namespace sentinel::text
