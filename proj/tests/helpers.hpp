#pragma once

// Test-only oracles and fixtures. The oracles deliberately recompute
// everything from scratch, independent of the library's code paths.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "patanalog/clp.hpp"
#include "patanalog/ingest.hpp"
#include "patanalog/trainer.hpp"
#include "patanalog/vectors.hpp"

namespace testutil {

// ---- scratch directories -------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("patanalog_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(++counter));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// ---- independent vector-math oracles --------------------------------------

inline double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    double s = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::min(1.0, std::max(-1.0, s));
}

inline std::vector<double> oracle_mean(const std::vector<std::vector<double>>& vs) {
    std::vector<double> mean(vs.front().size(), 0.0);
    for (const auto& v : vs)
        for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
    for (auto& x : mean) x /= static_cast<double>(vs.size());
    return mean;
}

inline double oracle_n_similarity(const std::vector<std::vector<double>>& a,
                                  const std::vector<std::vector<double>>& b) {
    return oracle_cosine(oracle_mean(a), oracle_mean(b));
}

inline std::vector<double> oracle_cluster_center(const std::vector<std::vector<double>>& vs) {
    std::vector<std::vector<double>> units;
    for (const auto& v : vs) {
        double n = 0;
        for (double x : v) n += x * x;
        n = std::sqrt(n);
        std::vector<double> u(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i] / n;
        units.push_back(std::move(u));
    }
    auto mean = oracle_mean(units);
    double n = 0;
    for (double x : mean) n += x * x;
    n = std::sqrt(n);
    for (auto& x : mean) x /= n;
    return mean;
}

struct OracleHit {
    std::string term;
    double score;
};

/// Exhaustive cosine scan, score desc then lexicographic.
inline std::vector<OracleHit> oracle_most_similar(
    const std::map<std::string, std::vector<double>>& model, const std::string& query,
    std::size_t k) {
    std::vector<OracleHit> hits;
    const auto& qv = model.at(query);
    for (const auto& [term, v] : model) {
        if (term == query) continue;
        double n = 0;
        for (double x : v) n += x * x;
        hits.push_back({term, n == 0 ? -1.0 : oracle_cosine(qv, v)});
    }
    std::sort(hits.begin(), hits.end(), [](const OracleHit& a, const OracleHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

// ---- language oracle -------------------------------------------------------

/// Character-class frequency count, written against the rule statement
/// rather than the implementation.
inline patanalog::Language oracle_language(const std::string& text) {
    auto chars = patanalog::uni::to_u32(text);
    std::size_t cyr = 0, lat = 0;
    bool marker = false;
    for (char32_t c : chars) {
        if (c >= 0x0400 && c <= 0x04FF) {
            ++cyr;
            for (char32_t m : {U'і', U'ї', U'є', U'ґ', U'І', U'Ї',
                               U'Є', U'Ґ'})
                if (c == m) marker = true;
        } else if ((c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z')) {
            ++lat;
        }
    }
    std::size_t letters = cyr + lat;
    if (letters == 0) return patanalog::Language::unknown;
    if (cyr > letters - cyr) return marker ? patanalog::Language::uk : patanalog::Language::ru;
    if (lat > letters - lat) return patanalog::Language::en;
    return patanalog::Language::unknown;
}

// ---- finite differences ----------------------------------------------------

/// Central finite difference of sgns_loss along one coordinate of one
/// of the participating vectors.
inline double finite_difference(std::vector<double> v, std::vector<double> u_pos,
                                std::vector<std::vector<double>> u_negs, int which_vector,
                                std::size_t coord, double eps = 1e-6) {
    auto eval = [&](double delta) {
        auto v2 = v;
        auto p2 = u_pos;
        auto n2 = u_negs;
        if (which_vector == 0) v2[coord] += delta;
        else if (which_vector == 1) p2[coord] += delta;
        else n2[which_vector - 2][coord] += delta;
        return patanalog::sgns_loss(v2, p2, n2);
    };
    return (eval(eps) - eval(-eps)) / (2 * eps);
}

// ---- random model generator -------------------------------------------------

struct RandomModel {
    patanalog::KeyedVectors kv;
    std::map<std::string, std::vector<double>> reference;
};

inline RandomModel random_model(std::mt19937_64& rng, std::size_t max_terms = 20,
                                std::size_t max_dim = 16) {
    std::uniform_int_distribution<std::size_t> terms_dist(2, max_terms);
    std::uniform_int_distribution<std::size_t> dim_dist(2, max_dim);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    const std::size_t n = terms_dist(rng);
    const std::size_t d = dim_dist(rng);
    std::vector<std::string> terms;
    std::vector<double> matrix;
    std::map<std::string, std::vector<double>> reference;
    for (std::size_t i = 0; i < n; ++i) {
        std::string term = "t" + std::to_string(i);
        std::vector<double> v(d);
        bool nonzero = false;
        for (auto& x : v) {
            x = coord(rng);
            if (x != 0) nonzero = true;
        }
        if (!nonzero) v[0] = 1.0;
        terms.push_back(term);
        matrix.insert(matrix.end(), v.begin(), v.end());
        reference.emplace(std::move(term), std::move(v));
    }
    return {patanalog::KeyedVectors(std::move(terms), std::move(matrix), d), std::move(reference)};
}

// ---- synthetic two-cluster patent fixture -----------------------------------

struct ClusterFixture {
    std::vector<patanalog::ExtractedText> cluster1;
    std::vector<patanalog::ExtractedText> cluster2;
    std::string query_text;  // drawn from cluster 1
};

inline const std::vector<std::string>& cluster1_words() {
    static const std::vector<std::string> words = {
        "пристрій", "сенсор",  "вимірювання", "сигнал",
        "датчик",   "частота", "імпульс",     "генератор"};
    return words;
}

inline const std::vector<std::string>& cluster2_words() {
    static const std::vector<std::string> words = {
        "розчин", "кислота",     "реакція",     "полімер",
        "суміш",  "каталізатор", "температура", "синтез"};
    return words;
}

inline std::string synth_patent(const std::vector<std::string>& vocab, std::mt19937_64& rng,
                                std::size_t sentences = 50, std::size_t words_per_sentence = 8) {
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::string text;
    for (std::size_t s = 0; s < sentences; ++s) {
        for (std::size_t w = 0; w < words_per_sentence; ++w) {
            if (w) text += " ";
            text += vocab[pick(rng)];
        }
        text += ". ";
    }
    return text;
}

inline ClusterFixture make_cluster_fixture(std::uint64_t seed, std::size_t per_cluster = 10,
                                           std::size_t sentences = 50) {
    std::mt19937_64 rng(seed);
    ClusterFixture fx;
    for (std::size_t i = 0; i < per_cluster; ++i) {
        patanalog::ExtractedText doc;
        doc.doc_id = "c1_" + std::to_string(i);
        doc.text = synth_patent(cluster1_words(), rng, sentences);
        doc.language = patanalog::Language::uk;
        fx.cluster1.push_back(std::move(doc));
    }
    for (std::size_t i = 0; i < per_cluster; ++i) {
        patanalog::ExtractedText doc;
        doc.doc_id = "c2_" + std::to_string(i);
        doc.text = synth_patent(cluster2_words(), rng, sentences);
        doc.language = patanalog::Language::uk;
        fx.cluster2.push_back(std::move(doc));
    }
    fx.query_text = synth_patent(cluster1_words(), rng, 10);
    return fx;
}

// ---- random corpus generator --------------------------------------------------

inline patanalog::NormalizedCorpus random_corpus(std::mt19937_64& rng, std::size_t max_sentences = 30,
                                                 std::size_t vocab_size = 12) {
    std::uniform_int_distribution<std::size_t> n_sent(1, max_sentences);
    std::uniform_int_distribution<std::size_t> sent_len(1, 12);
    std::uniform_int_distribution<std::size_t> pick(0, vocab_size - 1);
    patanalog::NormalizedCorpus corpus;
    const std::size_t sentences = n_sent(rng);
    for (std::size_t s = 0; s < sentences; ++s) {
        std::vector<std::string> sentence;
        const std::size_t len = sent_len(rng);
        for (std::size_t w = 0; w < len; ++w) sentence.push_back("w" + std::to_string(pick(rng)));
        corpus.sentences.push_back(std::move(sentence));
    }
    corpus.recount();
    return corpus;
}

/// Splits every '_'-joined term and returns the sentence's flat token
/// multiset.
inline std::multiset<std::string> flatten_multiset(const std::vector<std::string>& sentence) {
    std::multiset<std::string> out;
    for (const auto& term : sentence) {
        std::size_t start = 0;
        while (start <= term.size()) {
            auto us = term.find('_', start);
            if (us == std::string::npos) us = term.size();
            out.insert(term.substr(start, us - start));
            if (us == term.size()) break;
            start = us + 1;
        }
    }
    return out;
}

}  // namespace testutil
