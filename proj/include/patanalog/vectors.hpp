#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "patanalog/error.hpp"

namespace patanalog {

struct ScoredTerm {
    std::string term;
    double score;
};

/// Immutable term → vector map. Row i of the flat matrix is the vector
/// of terms[i].
class KeyedVectors {
public:
    KeyedVectors() = default;

    KeyedVectors(std::vector<std::string> terms, std::vector<double> matrix, std::size_t dim)
        : terms_(std::move(terms)), matrix_(std::move(matrix)), dim_(dim) {
        if (dim_ == 0) throw Error(ErrorCode::dimension_mismatch, "dimension must be positive");
        if (matrix_.size() != terms_.size() * dim_)
            throw Error(ErrorCode::dimension_mismatch, "matrix size does not match |V| x d");
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (!index_.emplace(terms_[i], i).second)
                throw Error(ErrorCode::malformed_model_file, "duplicate term '" + terms_[i] + "'");
        bool any_nonzero = false;
        for (double x : matrix_) {
            if (!std::isfinite(x))
                throw Error(ErrorCode::malformed_model_file, "non-finite coordinate in model");
            if (x != 0) any_nonzero = true;
        }
        if (!any_nonzero)
            throw Error(ErrorCode::malformed_model_file, "model has no nonzero vector");
    }

    std::size_t size() const noexcept { return terms_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<std::string>& terms() const noexcept { return terms_; }

    bool contains(const std::string& term) const { return index_.count(term) != 0; }

    std::span<const double> vector(const std::string& term) const {
        auto it = index_.find(term);
        if (it == index_.end())
            throw Error(ErrorCode::unknown_term, "term '" + term + "' not in vocabulary");
        return row(it->second);
    }

    std::span<const double> row(std::size_t i) const {
        return {matrix_.data() + i * dim_, dim_};
    }

private:
    std::vector<std::string> terms_;
    std::vector<double> matrix_;
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

namespace vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double clamp_score(double s) { return std::clamp(s, -1.0, 1.0); }

inline double cosine(std::span<const double> a, std::span<const double> b) {
    return clamp_score(dot(a, b) / (norm(a) * norm(b)));
}

}  // namespace vec

/// Cosine similarity of two in-vocabulary terms.
inline double similarity(const KeyedVectors& model, const std::string& term_a,
                         const std::string& term_b) {
    auto a = model.vector(term_a);
    auto b = model.vector(term_b);
    if (vec::norm(a) == 0) throw Error(ErrorCode::zero_vector, "term '" + term_a + "' has a zero vector");
    if (vec::norm(b) == 0) throw Error(ErrorCode::zero_vector, "term '" + term_b + "' has a zero vector");
    return vec::cosine(a, b);
}

/// Top-k semantic associates, score descending, lexicographic tie-break.
inline std::vector<ScoredTerm> most_similar(const KeyedVectors& model, const std::string& term,
                                            std::size_t k) {
    if (k == 0) throw Error(ErrorCode::domain_error, "k must be >= 1");
    auto query = model.vector(term);
    if (vec::norm(query) == 0) throw Error(ErrorCode::zero_vector, "term '" + term + "' has a zero vector");
    std::vector<ScoredTerm> scored;
    scored.reserve(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& other = model.terms()[i];
        if (other == term) continue;
        auto v = model.row(i);
        double n = vec::norm(v);
        double score = n == 0 ? -1.0 : vec::cosine(query, v);
        scored.push_back({other, score});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

/// Unit-normalized mean of the unit-normalized member vectors.
inline std::vector<double> cluster_center(const KeyedVectors& model,
                                          const std::vector<std::string>& terms) {
    if (terms.empty()) throw Error(ErrorCode::domain_error, "cluster_center requires a non-empty term list");
    std::vector<double> mean(model.dim(), 0.0);
    for (const auto& term : terms) {
        auto v = model.vector(term);
        double n = vec::norm(v);
        if (n == 0) throw Error(ErrorCode::zero_vector, "term '" + term + "' has a zero vector");
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i] / n;
    }
    for (auto& x : mean) x /= static_cast<double>(terms.size());
    double n = vec::norm(mean);
    if (n < 1e-12) throw Error(ErrorCode::degenerate_center, "member vectors cancel out");
    for (auto& x : mean) x /= n;
    return mean;
}

/// Cosine between the arithmetic means of the raw member vectors;
/// duplicates count with multiplicity.
inline double n_similarity(const KeyedVectors& model, const std::vector<std::string>& set_a,
                           const std::vector<std::string>& set_b) {
    if (set_a.empty() || set_b.empty())
        throw Error(ErrorCode::domain_error, "n_similarity requires non-empty term sets");
    auto mean_of = [&](const std::vector<std::string>& terms) {
        std::vector<double> mean(model.dim(), 0.0);
        for (const auto& term : terms) {
            auto v = model.vector(term);
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
        }
        for (auto& x : mean) x /= static_cast<double>(terms.size());
        return mean;
    };
    auto ma = mean_of(set_a);
    auto mb = mean_of(set_b);
    if (vec::norm(ma) == 0 || vec::norm(mb) == 0)
        throw Error(ErrorCode::degenerate_mean, "a term set has a zero mean vector");
    return vec::cosine(ma, mb);
}

// ---- model file IO -----------------------------------------------------

/// Text format: header "<|V|> <d>", then one "<term> <v1> ... <vd>" line
/// per term, coordinates printed with 9 significant digits.
inline std::string serialize_model(const KeyedVectors& model) {
    std::string out;
    out += std::to_string(model.size()) + " " + std::to_string(model.dim()) + "\n";
    char buf[64];
    for (std::size_t i = 0; i < model.size(); ++i) {
        out += model.terms()[i];
        for (double x : model.row(i)) {
            std::snprintf(buf, sizeof buf, " %.9g", x);
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

inline KeyedVectors parse_model(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::size_t count = 0, dim = 0;
    std::string header;
    if (!std::getline(in, header))
        throw Error(ErrorCode::malformed_model_file, "empty model file");
    {
        std::istringstream hs(header);
        if (!(hs >> count >> dim) || dim == 0)
            throw Error(ErrorCode::malformed_model_file, "bad header '" + header + "'");
        std::string extra;
        if (hs >> extra) throw Error(ErrorCode::malformed_model_file, "trailing header tokens");
    }
    std::vector<std::string> terms;
    std::vector<double> matrix;
    terms.reserve(count);
    matrix.reserve(count * dim);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string term;
        if (!(ls >> term)) throw Error(ErrorCode::malformed_model_file, "blank vector line");
        double x;
        std::size_t n = 0;
        while (ls >> x) {
            matrix.push_back(x);
            ++n;
        }
        if (!ls.eof())
            throw Error(ErrorCode::malformed_model_file, "non-numeric coordinate for term '" + term + "'");
        if (n != dim)
            throw Error(ErrorCode::malformed_model_file,
                        "term '" + term + "' has " + std::to_string(n) + " coordinates, expected " + std::to_string(dim));
        terms.push_back(std::move(term));
    }
    if (terms.size() != count)
        throw Error(ErrorCode::malformed_model_file,
                    "header declares " + std::to_string(count) + " terms, file has " + std::to_string(terms.size()));
    return KeyedVectors(std::move(terms), std::move(matrix), dim);
}

inline void save_model(const KeyedVectors& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::not_found, "cannot open '" + path + "' for writing");
    out << serialize_model(model);
    if (!out) throw Error(ErrorCode::storage_corruption, "short write to '" + path + "'");
}

inline KeyedVectors load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::not_found, "model file '" + path + "' not readable");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

}  // namespace patanalog
