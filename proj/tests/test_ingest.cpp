#include <catch2/catch_amalgamated.hpp>

#include "patanalog/ingest.hpp"

#include "helpers.hpp"

using namespace patanalog;

namespace {

RawDocument make_doc(const std::string& text, DocumentFormat fmt = DocumentFormat::plain_text,
                     TextEncoding enc = TextEncoding::utf8) {
    RawDocument doc;
    doc.id = "d1";
    doc.payload.assign(text.begin(), text.end());
    doc.declared_format = fmt;
    doc.declared_encoding = enc;
    return doc;
}

}  // namespace

TEST_CASE("extract_text on utf8 Ukrainian plain text") {
    auto out = extract_text(make_doc("Пристрій для вимірювання."));
    CHECK(out.text == "Пристрій для вимірювання.");
    CHECK(out.language == Language::uk);
    CHECK(out.language == testutil::oracle_language(out.text));
}

TEST_CASE("extract_text on empty payload") {
    auto out = extract_text(make_doc(""));
    CHECK(out.text.empty());
    CHECK(out.language == Language::unknown);
}

TEST_CASE("extract_text rejects binary formats") {
    for (auto fmt : {DocumentFormat::pdf, DocumentFormat::doc, DocumentFormat::docx}) {
        try {
            extract_text(make_doc("x", fmt));
            FAIL("expected UnsupportedFormat");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::unsupported_format);
        }
    }
}

TEST_CASE("extract_text collapses whitespace but keeps newlines") {
    auto out = extract_text(make_doc("a  \t b\n\n  c"));
    CHECK(out.text == "a b\n\nc");
}

TEST_CASE("extract_text is idempotent on its own output") {
    auto first = extract_text(make_doc("Пристрій   має\tознаки.\nДруге  речення."));
    auto second = extract_text(make_doc(first.text));
    CHECK(second.text == first.text);
    CHECK(second.language == first.language);
}

TEST_CASE("extract_text rejects invalid utf8") {
    RawDocument doc;
    doc.id = "bad";
    doc.payload = {0xFF, 0xFE, 0x41};
    CHECK_THROWS_AS(extract_text(doc), Error);
}

TEST_CASE("detect_language on the spec examples") {
    CHECK(detect_language("Пристрій має ознаки") == Language::uk);
    CHECK(detect_language("the quick brown fox") == Language::en);
    CHECK(detect_language("1234 %% $$") == Language::unknown);
    CHECK(detect_language("") == Language::unknown);
    // Cyrillic without Ukrainian markers reads as Russian
    CHECK(detect_language("устройство для обработки") == Language::ru);
}

TEST_CASE("detect_language agrees with the character-count oracle") {
    const std::vector<std::string> samples = {
        "Пристрій має ознаки", "the quick brown fox", "щось mixed text here",
        "обработка данных",    "ґудзик",              "hello Пристрій world wide web",
        "123",                 "і",                   "abc где",
    };
    for (const auto& s : samples) CHECK(detect_language(s) == testutil::oracle_language(s));
}

TEST_CASE("detect_language ignores word order") {
    auto a = detect_language("Пристрій має ознаки");
    auto b = detect_language("ознаки Пристрій має");
    CHECK(a == b);
}

TEST_CASE("convert_encoding maps АБВ to the win1251 code page") {
    std::string s = "АБВ";
    std::vector<std::uint8_t> payload(s.begin(), s.end());
    auto out = convert_encoding(payload, TextEncoding::utf8, TextEncoding::win1251);
    CHECK(out.bytes == std::vector<std::uint8_t>{0xC0, 0xC1, 0xC2});
    CHECK(out.replacements == 0);
}

TEST_CASE("convert_encoding round trip on pure-Cyrillic text") {
    std::string s = "Пристрій для вимірювання має ознаки. Ґудзик їжак єнот.";
    std::vector<std::uint8_t> payload(s.begin(), s.end());
    auto there = convert_encoding(payload, TextEncoding::utf8, TextEncoding::win1251);
    REQUIRE(there.replacements == 0);
    auto back = convert_encoding(there.bytes, TextEncoding::win1251, TextEncoding::utf8);
    CHECK(std::string(back.bytes.begin(), back.bytes.end()) == s);
}

TEST_CASE("convert_encoding replaces the euro sign") {
    std::string s = "€";
    std::vector<std::uint8_t> payload(s.begin(), s.end());
    auto out = convert_encoding(payload, TextEncoding::utf8, TextEncoding::win1251);
    CHECK(out.bytes == std::vector<std::uint8_t>{0x3F});
    CHECK(out.replacements == 1);
}

TEST_CASE("convert_encoding rejects bytes invalid under the source encoding") {
    std::vector<std::uint8_t> bad = {0xC0};  // truncated utf8 sequence
    CHECK_THROWS_AS(convert_encoding(bad, TextEncoding::utf8, TextEncoding::win1251), Error);
}

TEST_CASE("win1251 extract path decodes legacy payloads") {
    auto doc = make_doc("", DocumentFormat::plain_text, TextEncoding::win1251);
    doc.payload = {0xCF, 0xF0, 0xE8, 0xEB, 0xE0, 0xE4};  // "Прилад"
    auto out = extract_text(doc);
    CHECK(out.text == "Прилад");
}
