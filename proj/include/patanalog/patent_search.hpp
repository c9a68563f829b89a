#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "patanalog/clp.hpp"
#include "patanalog/error.hpp"
#include "patanalog/ingest.hpp"
#include "patanalog/store.hpp"
#include "patanalog/vectors.hpp"

namespace patanalog {

inline constexpr char kPatentCollection[] = "patents";
inline constexpr char kDocumentCollection[] = "documents";
inline constexpr double kAnalogThreshold = 0.5;

enum class Verdict { similar, dissimilar };

inline const char* to_string(Verdict v) {
    return v == Verdict::similar ? "similar" : "dissimilar";
}

/// similar iff score > 0.5; the boundary itself reads as dissimilar.
inline Verdict classify(double score) {
    if (score < -1.0 || score > 1.0)
        throw Error(ErrorCode::domain_error, "score outside [-1, 1]");
    return score > kAnalogThreshold ? Verdict::similar : Verdict::dissimilar;
}

struct PatentRecord {
    std::string id;
    std::string title;
    std::string ipc_class;
    std::vector<std::string> term_array;
    std::string text_ref;

    json to_json() const {
        return json{{"id", id},
                    {"title", title},
                    {"ipc_class", ipc_class},
                    {"term_array", term_array},
                    {"text_ref", text_ref}};
    }

    static PatentRecord from_json(const json& j) {
        PatentRecord r;
        try {
            r.id = j.at("id").get<std::string>();
            r.title = j.value("title", "");
            r.ipc_class = j.value("ipc_class", "");
            r.term_array = j.at("term_array").get<std::vector<std::string>>();
            r.text_ref = j.value("text_ref", "");
        } catch (const json::exception& e) {
            throw Error(ErrorCode::storage_corruption, std::string("bad patent record: ") + e.what());
        }
        return r;
    }
};

struct RankedAnalog {
    std::string patent_id;
    double score;
    Verdict verdict;
};

struct SearchResult {
    std::string query_id;
    std::size_t dropped_oov_terms = 0;
    std::vector<RankedAnalog> results;

    json to_json() const {
        json items = json::array();
        for (const auto& r : results)
            items.push_back({{"patent_id", r.patent_id},
                             {"score", r.score},
                             {"verdict", to_string(r.verdict)}});
        return json{{"query_id", query_id},
                    {"dropped_oov_terms", dropped_oov_terms},
                    {"results", items}};
    }
};

struct PatentMetadata {
    std::string title;
    std::string ipc_class;
};

namespace detail {

/// Longest-match joining of adjacent terms against the model's existing
/// '_'-joined vocabulary, then in-vocabulary filtering. Returns the kept
/// terms and the count of dropped out-of-vocabulary terms.
inline std::pair<std::vector<std::string>, std::size_t> vocab_terms(
    const std::vector<std::vector<std::string>>& sentences, const KeyedVectors& model) {
    std::size_t max_phrase_len = 1;
    for (const auto& term : model.terms())
        max_phrase_len = std::max(max_phrase_len,
                                  static_cast<std::size_t>(std::count(term.begin(), term.end(), '_')) + 1);
    std::vector<std::string> kept;
    std::size_t dropped = 0;
    for (const auto& sentence : sentences) {
        std::size_t i = 0;
        while (i < sentence.size()) {
            bool matched = false;
            const std::size_t longest = std::min(max_phrase_len, sentence.size() - i);
            for (std::size_t len = longest; len >= 1; --len) {
                std::string candidate = sentence[i];
                for (std::size_t k = 1; k < len; ++k) candidate += "_" + sentence[i + k];
                if (model.contains(candidate)) {
                    kept.push_back(std::move(candidate));
                    i += len;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                ++dropped;
                ++i;
            }
        }
    }
    return {std::move(kept), dropped};
}

}  // namespace detail

struct TermExtraction {
    std::vector<std::string> terms;
    std::size_t dropped_oov = 0;
};

inline TermExtraction extract_query_terms(const ExtractedText& doc, const KeyedVectors& model,
                                          const ClpResources& res) {
    if (doc.language != Language::uk)
        throw Error(ErrorCode::language_mismatch, "document '" + doc.doc_id + "' is not Ukrainian",
                    {doc.doc_id});
    auto sentences = normalize_document(doc.text, res);
    auto [terms, dropped] = detail::vocab_terms(sentences, model);
    if (terms.empty())
        throw Error(ErrorCode::empty_term_array,
                    "no term of document '" + doc.doc_id + "' is in the model vocabulary");
    return {std::move(terms), dropped};
}

/// Runs the per-document CLP pipeline against the model vocabulary and
/// persists the resulting record (upsert).
inline PatentRecord index_patent(DocumentStore& store, const KeyedVectors& model,
                                 const ExtractedText& doc, const PatentMetadata& metadata,
                                 const ClpResources& res) {
    auto extraction = extract_query_terms(doc, model, res);
    PatentRecord record;
    record.id = doc.doc_id;
    record.title = metadata.title;
    record.ipc_class = metadata.ipc_class;
    record.term_array = std::move(extraction.terms);
    record.text_ref = std::string(kDocumentCollection) + "/" + doc.doc_id;
    store.put(kPatentCollection, record.id, record.to_json());
    return record;
}

/// Set-to-set similarity against every stored patent; score descending,
/// id-ascending tie-break, top k, verdicts attached.
inline SearchResult search_analogs(const DocumentStore& store, const KeyedVectors& model,
                                   const ExtractedText& new_patent, std::size_t k,
                                   const ClpResources& res) {
    if (k == 0) throw Error(ErrorCode::domain_error, "k must be >= 1");
    auto ids = store.list(kPatentCollection);
    if (ids.empty()) throw Error(ErrorCode::empty_store, "no indexed patents to search");
    auto extraction = extract_query_terms(new_patent, model, res);

    SearchResult result;
    result.query_id = new_patent.doc_id;
    result.dropped_oov_terms = extraction.dropped_oov;
    for (const auto& id : ids) {
        auto record = PatentRecord::from_json(store.get(kPatentCollection, id));
        double score = n_similarity(model, extraction.terms, record.term_array);
        result.results.push_back({record.id, score, classify(score)});
    }
    std::sort(result.results.begin(), result.results.end(),
              [](const RankedAnalog& a, const RankedAnalog& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.patent_id < b.patent_id;
              });
    if (result.results.size() > k) result.results.resize(k);
    return result;
}

/// Replaces every {{name}} placeholder; unresolved names are collected
/// into a single MissingField error.
inline std::string fill_template(const std::string& tmpl,
                                 const std::map<std::string, std::string>& fields) {
    std::string out;
    out.reserve(tmpl.size());
    std::set<std::string> missing;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        auto open = tmpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        auto close = tmpl.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        std::string name = tmpl.substr(open + 2, close - open - 2);
        auto it = fields.find(name);
        if (it == fields.end())
            missing.insert(name);
        else
            out += it->second;
        pos = close + 2;
    }
    if (!missing.empty()) {
        std::string msg = "unresolved placeholders:";
        std::vector<std::string> names(missing.begin(), missing.end());
        for (const auto& n : names) msg += " " + n;
        throw Error(ErrorCode::missing_field, msg, names);
    }
    return out;
}

}  // namespace patanalog
