#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "patanalog/error.hpp"
#include "patanalog/unicode.hpp"

namespace patanalog {

enum class DocumentFormat { plain_text, pdf, doc, docx };
enum class TextEncoding { utf8, win1251, unknown };
enum class Language { uk, ru, en, unknown };

inline const char* to_string(DocumentFormat f) {
    switch (f) {
        case DocumentFormat::plain_text: return "plain_text";
        case DocumentFormat::pdf: return "pdf";
        case DocumentFormat::doc: return "doc";
        case DocumentFormat::docx: return "docx";
    }
    return "plain_text";
}

inline const char* to_string(TextEncoding e) {
    switch (e) {
        case TextEncoding::utf8: return "utf8";
        case TextEncoding::win1251: return "win1251";
        case TextEncoding::unknown: return "unknown";
    }
    return "unknown";
}

inline const char* to_string(Language l) {
    switch (l) {
        case Language::uk: return "uk";
        case Language::ru: return "ru";
        case Language::en: return "en";
        case Language::unknown: return "unknown";
    }
    return "unknown";
}

inline DocumentFormat format_from_string(std::string_view s) {
    if (s == "plain_text") return DocumentFormat::plain_text;
    if (s == "pdf") return DocumentFormat::pdf;
    if (s == "doc") return DocumentFormat::doc;
    if (s == "docx") return DocumentFormat::docx;
    throw Error(ErrorCode::unsupported_format, "unknown format '" + std::string(s) + "'");
}

inline TextEncoding encoding_from_string(std::string_view s) {
    if (s == "utf8") return TextEncoding::utf8;
    if (s == "win1251") return TextEncoding::win1251;
    if (s == "unknown" || s.empty()) return TextEncoding::unknown;
    throw Error(ErrorCode::encoding_error, "unknown encoding '" + std::string(s) + "'");
}

inline Language language_from_string(std::string_view s) {
    if (s == "uk") return Language::uk;
    if (s == "ru") return Language::ru;
    if (s == "en") return Language::en;
    return Language::unknown;
}

struct RawDocument {
    std::string id;
    std::vector<std::uint8_t> payload;
    DocumentFormat declared_format = DocumentFormat::plain_text;
    TextEncoding declared_encoding = TextEncoding::utf8;
};

struct ExtractedText {
    std::string doc_id;
    std::string text;  // UTF-8, no NULs
    Language language = Language::unknown;
};

/// Character-statistics language classifier: uk when Cyrillic letters
/// dominate (>50% of letters) and a Ukrainian marker letter occurs,
/// ru when Cyrillic dominates without markers, en when Latin dominates.
inline Language detect_language(std::string_view text) {
    std::size_t cyr = 0, lat = 0, letters = 0;
    bool marker = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = uni::decode_utf8(text, pos);
        if (uni::is_cyrillic_letter(cp)) {
            ++cyr;
            ++letters;
            if (uni::is_ukrainian_marker(cp)) marker = true;
        } else if (uni::is_latin_letter(cp)) {
            ++lat;
            ++letters;
        }
    }
    if (letters == 0) return Language::unknown;
    if (cyr * 2 > letters) return marker ? Language::uk : Language::ru;
    if (lat * 2 > letters) return Language::en;
    return Language::unknown;
}

struct EncodedText {
    std::vector<std::uint8_t> bytes;
    std::size_t replacements = 0;  // characters mapped to '?' in the target
};

/// Recodes between utf8 and win1251. Unrepresentable characters become
/// '?' and are counted in the replacement tally.
inline EncodedText convert_encoding(const std::vector<std::uint8_t>& payload,
                                    TextEncoding from, TextEncoding to) {
    if ((from != TextEncoding::utf8 && from != TextEncoding::win1251) ||
        (to != TextEncoding::utf8 && to != TextEncoding::win1251)) {
        throw Error(ErrorCode::encoding_error, "convert_encoding supports only utf8 and win1251");
    }
    std::u32string scalars;
    if (from == TextEncoding::utf8) {
        std::string_view view(reinterpret_cast<const char*>(payload.data()), payload.size());
        scalars = uni::to_u32(view);
    } else {
        scalars.reserve(payload.size());
        for (std::uint8_t b : payload) {
            auto cp = uni::win1251_to_unicode(b);
            if (!cp) throw Error(ErrorCode::encoding_error, "byte 0x" + std::to_string(b) + " unassigned in win1251");
            scalars.push_back(*cp);
        }
    }
    EncodedText out;
    if (to == TextEncoding::utf8) {
        std::string buf;
        for (char32_t cp : scalars) uni::append_utf8(buf, cp);
        out.bytes.assign(buf.begin(), buf.end());
    } else {
        out.bytes.reserve(scalars.size());
        for (char32_t cp : scalars) {
            auto b = uni::unicode_to_win1251(cp);
            if (b) {
                out.bytes.push_back(*b);
            } else {
                out.bytes.push_back('?');
                ++out.replacements;
            }
        }
    }
    return out;
}

namespace detail {

/// Collapses runs of spaces/tabs to one space; newlines are preserved
/// and absorb adjacent horizontal whitespace.
inline std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (c == '\r') continue;
        if (c == ' ' || c == '\t') {
            pending_space = !out.empty() && out.back() != '\n';
            continue;
        }
        if (c == '\n') {
            pending_space = false;
            out.push_back('\n');
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace detail

/// Plain-text extraction path: decodes the payload, normalizes
/// whitespace, detects the language. Binary formats are rejected.
inline ExtractedText extract_text(const RawDocument& doc) {
    if (doc.declared_format != DocumentFormat::plain_text) {
        throw Error(ErrorCode::unsupported_format,
                    std::string("format '") + to_string(doc.declared_format) +
                        "' has no extraction path; supply plain_text");
    }
    std::string utf8;
    if (doc.declared_encoding == TextEncoding::win1251) {
        auto converted = convert_encoding(doc.payload, TextEncoding::win1251, TextEncoding::utf8);
        utf8.assign(converted.bytes.begin(), converted.bytes.end());
    } else {
        // unknown is treated as utf8
        utf8.assign(doc.payload.begin(), doc.payload.end());
        uni::to_u32(utf8);  // validate
    }
    if (utf8.find('\0') != std::string::npos)
        throw Error(ErrorCode::encoding_error, "text contains NUL characters");
    ExtractedText out;
    out.doc_id = doc.id;
    out.text = detail::normalize_whitespace(utf8);
    out.language = detect_language(out.text);
    return out;
}

}  // namespace patanalog
