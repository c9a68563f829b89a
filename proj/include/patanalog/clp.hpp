#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patanalog/error.hpp"
#include "patanalog/ingest.hpp"
#include "patanalog/unicode.hpp"

namespace patanalog {

enum class PartOfSpeech { noun, verb, adj, adv, prep, conj, num, punct, other, untagged };

inline const char* to_string(PartOfSpeech p) {
    switch (p) {
        case PartOfSpeech::noun: return "noun";
        case PartOfSpeech::verb: return "verb";
        case PartOfSpeech::adj: return "adj";
        case PartOfSpeech::adv: return "adv";
        case PartOfSpeech::prep: return "prep";
        case PartOfSpeech::conj: return "conj";
        case PartOfSpeech::num: return "num";
        case PartOfSpeech::punct: return "punct";
        case PartOfSpeech::other: return "other";
        case PartOfSpeech::untagged: return "untagged";
    }
    return "untagged";
}

inline PartOfSpeech pos_from_string(std::string_view s) {
    if (s == "noun") return PartOfSpeech::noun;
    if (s == "verb") return PartOfSpeech::verb;
    if (s == "adj") return PartOfSpeech::adj;
    if (s == "adv") return PartOfSpeech::adv;
    if (s == "prep") return PartOfSpeech::prep;
    if (s == "conj") return PartOfSpeech::conj;
    if (s == "num") return PartOfSpeech::num;
    if (s == "punct") return PartOfSpeech::punct;
    if (s == "other") return PartOfSpeech::other;
    return PartOfSpeech::untagged;
}

struct Token {
    std::string surface;
    std::string lemma;
    PartOfSpeech pos = PartOfSpeech::untagged;
    bool is_stopword = false;
};

using LemmaDictionary = std::unordered_map<std::string, std::string>;  // surface → lemma
using PosDictionary = std::unordered_map<std::string, PartOfSpeech>;   // lemma → pos
using StopList = std::set<std::string>;                                // lemmas

struct NormalizedCorpus {
    std::vector<std::vector<std::string>> sentences;
    std::map<std::string, std::size_t> vocab_counts;
    std::size_t total_tokens = 0;

    void recount() {
        vocab_counts.clear();
        total_tokens = 0;
        for (const auto& sentence : sentences) {
            for (const auto& term : sentence) {
                ++vocab_counts[term];
                ++total_tokens;
            }
        }
    }
};

struct PhraseConfig {
    double delta = 1.0;
    double threshold = 10.0;
    int max_passes = 2;
};

/// Splits on {. ! ? …}; a period directly preceding a lowercase letter
/// or digit is treated as an abbreviation dot and does not split.
inline std::vector<std::string> split_sentences(std::string_view text) {
    std::u32string chars = uni::to_u32(text);
    std::vector<std::string> sentences;
    std::u32string current;
    auto is_space = [](char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r'; };
    auto is_terminator = [](char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == 0x2026; };
    auto flush = [&] {
        std::size_t b = 0, e = current.size();
        while (b < e && is_space(current[b])) ++b;
        while (e > b && is_space(current[e - 1])) --e;
        if (e > b) sentences.push_back(uni::to_utf8(current.substr(b, e - b)));
        current.clear();
    };
    for (std::size_t i = 0; i < chars.size(); ++i) {
        current.push_back(chars[i]);
        if (!is_terminator(chars[i])) continue;
        // run of terminators counts as one boundary
        while (i + 1 < chars.size() && is_terminator(chars[i + 1])) current.push_back(chars[++i]);
        if (chars[i] == U'.') {
            std::size_t j = i + 1;
            while (j < chars.size() && is_space(chars[j])) ++j;
            if (j < chars.size()) {
                char32_t next = chars[j];
                bool lowercase = uni::is_letter(next) && uni::to_lower(next) == next;
                if (lowercase || uni::is_ascii_digit(next)) continue;  // abbreviation guard
            }
        }
        flush();
    }
    flush();
    return sentences;
}

/// Lowercased maximal runs of letters/digits; apostrophes and hyphens
/// are kept only between two word characters.
inline std::vector<std::string> tokenize(std::string_view sentence) {
    std::u32string chars = uni::to_u32(sentence);
    auto is_word_char = [](char32_t c) { return uni::is_letter(c) || uni::is_ascii_digit(c); };
    auto is_joiner = [](char32_t c) { return c == U'-' || c == U'\'' || c == 0x2019 || c == 0x02BC; };
    std::vector<std::string> tokens;
    std::u32string current;
    for (std::size_t i = 0; i < chars.size(); ++i) {
        char32_t c = chars[i];
        if (is_word_char(c)) {
            current.push_back(uni::to_lower(c));
        } else if (is_joiner(c) && !current.empty() && i + 1 < chars.size() && is_word_char(chars[i + 1])) {
            current.push_back(c == 0x2019 || c == 0x02BC ? U'\'' : c);
        } else if (!current.empty()) {
            tokens.push_back(uni::to_utf8(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(uni::to_utf8(current));
    return tokens;
}

/// Dictionary lookup with identity fallback.
inline std::string lemmatize(const std::string& surface, const LemmaDictionary& dictionary) {
    if (surface.empty())
        throw Error(ErrorCode::domain_error, "lemmatize requires a non-empty surface");
    auto it = dictionary.find(surface);
    return it == dictionary.end() ? surface : it->second;
}

inline std::vector<Token> pos_tag(std::vector<Token> tokens, const PosDictionary& dictionary) {
    for (auto& token : tokens) {
        auto it = dictionary.find(token.lemma);
        token.pos = it == dictionary.end() ? PartOfSpeech::untagged : it->second;
    }
    return tokens;
}

inline bool is_noise_pos(PartOfSpeech p) {
    return p == PartOfSpeech::prep || p == PartOfSpeech::conj ||
           p == PartOfSpeech::punct || p == PartOfSpeech::num;
}

inline std::vector<Token> remove_stopwords(const std::vector<Token>& tokens, const StopList& stoplist) {
    std::vector<Token> kept;
    kept.reserve(tokens.size());
    for (const auto& token : tokens) {
        if (stoplist.count(token.lemma) || is_noise_pos(token.pos)) continue;
        kept.push_back(token);
    }
    return kept;
}

namespace detail {

struct PairHash {
    std::size_t operator()(const std::pair<std::string, std::string>& p) const noexcept {
        std::hash<std::string> h;
        return h(p.first) * 31 + h(p.second);
    }
};

}  // namespace detail

/// Bigram score (count(ab) − δ)·N / (count(a)·count(b)); pairs over the
/// threshold merge greedily left to right, one merge per token per pass.
inline NormalizedCorpus detect_phrases(NormalizedCorpus corpus, const PhraseConfig& cfg) {
    if (cfg.threshold <= 0)
        throw Error(ErrorCode::domain_error, "phrase threshold must be positive");
    corpus.recount();
    for (int pass = 0; pass < cfg.max_passes; ++pass) {
        std::unordered_map<std::pair<std::string, std::string>, std::size_t, detail::PairHash> bigram_counts;
        for (const auto& sentence : corpus.sentences)
            for (std::size_t i = 0; i + 1 < sentence.size(); ++i)
                ++bigram_counts[{sentence[i], sentence[i + 1]}];
        const double n = static_cast<double>(corpus.total_tokens);
        bool merged_any = false;
        for (auto& sentence : corpus.sentences) {
            std::vector<std::string> out;
            out.reserve(sentence.size());
            std::size_t i = 0;
            while (i < sentence.size()) {
                if (i + 1 < sentence.size()) {
                    const auto ca = corpus.vocab_counts.at(sentence[i]);
                    const auto cb = corpus.vocab_counts.at(sentence[i + 1]);
                    const auto cab = bigram_counts.at({sentence[i], sentence[i + 1]});
                    const double score =
                        (static_cast<double>(cab) - cfg.delta) * n /
                        (static_cast<double>(ca) * static_cast<double>(cb));
                    if (score > cfg.threshold) {
                        out.push_back(sentence[i] + "_" + sentence[i + 1]);
                        i += 2;
                        merged_any = true;
                        continue;
                    }
                }
                out.push_back(sentence[i]);
                ++i;
            }
            sentence = std::move(out);
        }
        corpus.recount();
        if (!merged_any) break;
    }
    return corpus;
}

struct ClpResources {
    StopList stoplist;
    LemmaDictionary lemma_dictionary;
    PosDictionary pos_dictionary;
};

/// Per-document CLP stages up to stop-word removal; no corpus-global
/// phrase statistics.
inline std::vector<std::vector<std::string>> normalize_document(const std::string& text,
                                                                const ClpResources& res) {
    std::vector<std::vector<std::string>> sentences;
    for (const auto& sentence : split_sentences(text)) {
        std::vector<Token> tokens;
        for (auto& surface : tokenize(sentence)) {
            Token t;
            t.lemma = lemmatize(surface, res.lemma_dictionary);
            t.surface = std::move(surface);
            tokens.push_back(std::move(t));
        }
        tokens = pos_tag(std::move(tokens), res.pos_dictionary);
        tokens = remove_stopwords(tokens, res.stoplist);
        if (tokens.empty()) continue;
        std::vector<std::string> terms;
        terms.reserve(tokens.size());
        for (auto& t : tokens) terms.push_back(std::move(t.lemma));
        sentences.push_back(std::move(terms));
    }
    return sentences;
}

inline NormalizedCorpus build_corpus(const std::vector<ExtractedText>& docs,
                                     const ClpResources& res, const PhraseConfig& cfg) {
    std::vector<std::string> offenders;
    for (const auto& doc : docs)
        if (doc.language != Language::uk) offenders.push_back(doc.doc_id);
    if (!offenders.empty()) {
        std::string msg = "documents not in Ukrainian:";
        for (const auto& id : offenders) msg += " " + id;
        throw Error(ErrorCode::language_mismatch, msg, offenders);
    }
    NormalizedCorpus corpus;
    for (const auto& doc : docs) {
        auto sentences = normalize_document(doc.text, res);
        for (auto& s : sentences) corpus.sentences.push_back(std::move(s));
    }
    corpus.recount();
    return detect_phrases(std::move(corpus), cfg);
}

// ---- file formats ------------------------------------------------------

/// One entry per line, UTF-8.
inline StopList load_stoplist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::not_found, "stoplist file '" + path + "' not readable");
    StopList out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.insert(line);
    }
    return out;
}

/// Lines "surface<TAB>lemma".
inline LemmaDictionary load_lemma_dictionary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::not_found, "dictionary file '" + path + "' not readable");
    LemmaDictionary out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) continue;
        out[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return out;
}

/// Lines "lemma<TAB>pos".
inline PosDictionary load_pos_dictionary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::not_found, "dictionary file '" + path + "' not readable");
    PosDictionary out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) continue;
        out[line.substr(0, tab)] = pos_from_string(line.substr(tab + 1));
    }
    return out;
}

/// One sentence per line, terms space-separated.
inline std::string serialize_corpus(const NormalizedCorpus& corpus) {
    std::string out;
    for (const auto& sentence : corpus.sentences) {
        for (std::size_t i = 0; i < sentence.size(); ++i) {
            if (i) out.push_back(' ');
            out += sentence[i];
        }
        out.push_back('\n');
    }
    return out;
}

inline NormalizedCorpus parse_corpus(std::string_view text) {
    NormalizedCorpus corpus;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty()) {
            std::vector<std::string> terms;
            std::size_t p = 0;
            while (p < line.size()) {
                auto sp = line.find(' ', p);
                if (sp == std::string_view::npos) sp = line.size();
                if (sp > p) terms.emplace_back(line.substr(p, sp - p));
                p = sp + 1;
            }
            if (!terms.empty()) corpus.sentences.push_back(std::move(terms));
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    corpus.recount();
    return corpus;
}

}  // namespace patanalog
