#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patanalog/error.hpp"

namespace patanalog::uni {

/// Decodes one UTF-8 scalar starting at `pos`. Advances `pos` past it.
/// Throws EncodingError on malformed sequences (overlong forms accepted
/// are rejected, surrogates rejected, truncation rejected).
inline char32_t decode_utf8(std::string_view s, std::size_t& pos) {
    auto fail = [&] { throw Error(ErrorCode::encoding_error, "invalid UTF-8 byte sequence at offset " + std::to_string(pos)); };
    if (pos >= s.size()) fail();
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    else fail();
    if (pos + len > s.size()) fail();
    for (int i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) fail();
        cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail();
    pos += len;
    return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::u32string to_u32(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) out.push_back(decode_utf8(s, pos));
    return out;
}

inline std::string to_utf8(const std::u32string& s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) append_utf8(out, cp);
    return out;
}

inline bool is_latin_letter(char32_t c) {
    return (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z');
}

inline bool is_cyrillic_letter(char32_t c) {
    return c >= 0x0400 && c <= 0x04FF;
}

inline bool is_letter(char32_t c) { return is_latin_letter(c) || is_cyrillic_letter(c); }

inline bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

/// Ukrainian marker letters, either case: і ї є ґ / І Ї Є Ґ.
inline bool is_ukrainian_marker(char32_t c) {
    return c == 0x0456 || c == 0x0457 || c == 0x0454 || c == 0x0491 ||
           c == 0x0406 || c == 0x0407 || c == 0x0404 || c == 0x0490;
}

/// Lowercases ASCII Latin and the Cyrillic ranges used by uk/ru text.
inline char32_t to_lower(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 0x20;
    if (c >= 0x0410 && c <= 0x042F) return c + 0x20;   // А..Я
    if (c >= 0x0400 && c <= 0x040F) return c + 0x50;   // Ѐ..Џ incl. Є І Ї
    if (c == 0x0490) return 0x0491;                    // Ґ
    return c;
}

inline std::string lowercase_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) append_utf8(out, to_lower(decode_utf8(s, pos)));
    return out;
}

// Windows-1251 high half (0x80..0xFF) → Unicode. 0 marks an unassigned
// slot; 0x88 is kept unassigned (pre-euro table).
inline const char32_t* win1251_high_table() {
    static const char32_t table[128] = {
        0x0402, 0x0403, 0x201A, 0x0453, 0x201E, 0x2026, 0x2020, 0x2021,
        0x0000, 0x2030, 0x0409, 0x2039, 0x040A, 0x040C, 0x040B, 0x040F,
        0x0452, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
        0x0000, 0x2122, 0x0459, 0x203A, 0x045A, 0x045C, 0x045B, 0x045F,
        0x00A0, 0x040E, 0x045E, 0x0408, 0x00A4, 0x0490, 0x00A6, 0x00A7,
        0x0401, 0x00A9, 0x0404, 0x00AB, 0x00AC, 0x00AD, 0x00AE, 0x0407,
        0x00B0, 0x00B1, 0x0406, 0x0456, 0x0491, 0x00B5, 0x00B6, 0x00B7,
        0x0451, 0x2116, 0x0454, 0x00BB, 0x0458, 0x0405, 0x0455, 0x0457,
        0x0410, 0x0411, 0x0412, 0x0413, 0x0414, 0x0415, 0x0416, 0x0417,
        0x0418, 0x0419, 0x041A, 0x041B, 0x041C, 0x041D, 0x041E, 0x041F,
        0x0420, 0x0421, 0x0422, 0x0423, 0x0424, 0x0425, 0x0426, 0x0427,
        0x0428, 0x0429, 0x042A, 0x042B, 0x042C, 0x042D, 0x042E, 0x042F,
        0x0430, 0x0431, 0x0432, 0x0433, 0x0434, 0x0435, 0x0436, 0x0437,
        0x0438, 0x0439, 0x043A, 0x043B, 0x043C, 0x043D, 0x043E, 0x043F,
        0x0440, 0x0441, 0x0442, 0x0443, 0x0444, 0x0445, 0x0446, 0x0447,
        0x0448, 0x0449, 0x044A, 0x044B, 0x044C, 0x044D, 0x044E, 0x044F,
    };
    return table;
}

/// Unicode → win1251 byte. Empty optional means unrepresentable.
inline std::optional<unsigned char> unicode_to_win1251(char32_t cp) {
    if (cp < 0x80) return static_cast<unsigned char>(cp);
    static const std::unordered_map<char32_t, unsigned char> reverse = [] {
        std::unordered_map<char32_t, unsigned char> m;
        const char32_t* t = win1251_high_table();
        for (int i = 0; i < 128; ++i)
            if (t[i] != 0) m.emplace(t[i], static_cast<unsigned char>(0x80 + i));
        return m;
    }();
    auto it = reverse.find(cp);
    if (it == reverse.end()) return std::nullopt;
    return it->second;
}

inline std::optional<char32_t> win1251_to_unicode(unsigned char b) {
    if (b < 0x80) return static_cast<char32_t>(b);
    char32_t cp = win1251_high_table()[b - 0x80];
    if (cp == 0) return std::nullopt;
    return cp;
}

}  // namespace patanalog::uni
