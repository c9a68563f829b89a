#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "patanalog/clp.hpp"
#include "patanalog/error.hpp"
#include "patanalog/vectors.hpp"

namespace patanalog {

struct TrainingConfig {
    std::size_t dim = 100;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double lr0 = 0.025;
    std::size_t min_count = 5;
    double subsample = 1e-3;  // t; 0 turns subsampling off
    double noise_power = 0.75;
    std::uint64_t seed = 1;
    std::size_t workers = 1;  // 1 = deterministic mode
};

class Vocabulary {
public:
    Vocabulary(const NormalizedCorpus& corpus, const TrainingConfig& cfg) {
        std::vector<std::pair<std::string, std::size_t>> kept;
        for (const auto& [term, count] : corpus.vocab_counts)
            if (count >= cfg.min_count) kept.emplace_back(term, count);
        if (kept.empty())
            throw Error(ErrorCode::empty_vocabulary,
                        "no term reaches min_count = " + std::to_string(cfg.min_count));
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        terms_.reserve(kept.size());
        counts_.reserve(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
            terms_.push_back(kept[i].first);
            counts_.push_back(kept[i].second);
            index_.emplace(kept[i].first, i);
            corpus_tokens_ += kept[i].second;
        }
        build_noise_table(cfg.noise_power);
    }

    std::size_t size() const noexcept { return terms_.size(); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    std::size_t count(std::size_t i) const { return counts_[i]; }
    /// Tokens of the training corpus that survive the min_count filter.
    std::size_t corpus_tokens() const noexcept { return corpus_tokens_; }

    std::optional<std::size_t> index_of(const std::string& term) const {
        auto it = index_.find(term);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    double noise_probability(std::size_t i) const { return noise_probs_[i]; }

    /// Draws an index from the unigram^power noise distribution.
    template <typename Rng>
    std::size_t sample_noise(Rng& rng) const {
        std::size_t slot = rng() % noise_table_.size();
        return noise_table_[slot];
    }

private:
    void build_noise_table(double power) {
        noise_probs_.resize(terms_.size());
        double z = 0;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            noise_probs_[i] = std::pow(static_cast<double>(counts_[i]), power);
            z += noise_probs_[i];
        }
        for (auto& p : noise_probs_) p /= z;
        const std::size_t table_size = std::max<std::size_t>(terms_.size(), 1'000'000);
        noise_table_.reserve(table_size);
        std::size_t word = 0;
        double cumulative = noise_probs_[0];
        for (std::size_t slot = 0; slot < table_size; ++slot) {
            noise_table_.push_back(word);
            if (static_cast<double>(slot + 1) / table_size > cumulative && word + 1 < terms_.size()) {
                ++word;
                cumulative += noise_probs_[word];
            }
        }
    }

    std::vector<std::string> terms_;
    std::vector<std::size_t> counts_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> noise_probs_;
    std::vector<std::size_t> noise_table_;
    std::size_t corpus_tokens_ = 0;
};

inline Vocabulary build_vocab(const NormalizedCorpus& corpus, const TrainingConfig& cfg) {
    return Vocabulary(corpus, cfg);
}

/// min(1, sqrt(t/f)); t = 0 turns the feature off (keep everything).
inline double subsample_keep_prob(double f, double t) {
    if (!(f > 0.0) || f > 1.0)
        throw Error(ErrorCode::domain_error, "relative frequency must be in (0, 1]");
    if (t < 0.0) throw Error(ErrorCode::domain_error, "subsample threshold must be >= 0");
    if (t == 0.0) return 1.0;
    return std::min(1.0, std::sqrt(t / f));
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// L = −log σ(u_pos·v) − Σ log σ(−u_negᵢ·v).
inline double sgns_loss(std::span<const double> v_w, std::span<const double> u_pos,
                        const std::vector<std::vector<double>>& u_negs) {
    if (u_pos.size() != v_w.size())
        throw Error(ErrorCode::dimension_mismatch, "u_pos dimension mismatch");
    double loss = -std::log(sigmoid(vec::dot(u_pos, v_w)));
    for (const auto& u : u_negs) {
        if (u.size() != v_w.size())
            throw Error(ErrorCode::dimension_mismatch, "u_neg dimension mismatch");
        loss += -std::log(sigmoid(-vec::dot(u, v_w)));
    }
    return loss;
}

struct SgnsGradients {
    std::vector<double> d_v;
    std::vector<double> d_u_pos;
    std::vector<std::vector<double>> d_u_negs;
};

/// Analytic gradients of sgns_loss with respect to every vector.
inline SgnsGradients sgns_gradients(std::span<const double> v_w, std::span<const double> u_pos,
                                    const std::vector<std::vector<double>>& u_negs) {
    const std::size_t d = v_w.size();
    SgnsGradients g;
    g.d_v.assign(d, 0.0);
    g.d_u_pos.assign(d, 0.0);
    const double gp = sigmoid(vec::dot(u_pos, v_w)) - 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        g.d_v[i] += gp * u_pos[i];
        g.d_u_pos[i] = gp * v_w[i];
    }
    for (const auto& u : u_negs) {
        const double gn = sigmoid(vec::dot(std::span<const double>(u), v_w));
        std::vector<double> du(d);
        for (std::size_t i = 0; i < d; ++i) {
            g.d_v[i] += gn * u[i];
            du[i] = gn * v_w[i];
        }
        g.d_u_negs.push_back(std::move(du));
    }
    return g;
}

namespace detail {

/// splitmix64; cheap per-worker generator with full-state seeding.
struct Splitmix64 {
    std::uint64_t state;
    explicit Splitmix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t operator()() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    /// uniform in [0, 1)
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    /// uniform integer in [1, n]
    std::uint64_t one_to(std::uint64_t n) { return 1 + (*this)() % n; }
};

}  // namespace detail

/// Skip-gram with negative sampling. Deterministic with workers == 1;
/// with more workers updates are unsynchronized (lossy-update contract).
class SgnsTrainer {
public:
    SgnsTrainer(const NormalizedCorpus& corpus, TrainingConfig cfg)
        : cfg_(std::move(cfg)), vocab_(corpus, cfg_) {
        if (cfg_.dim == 0 || cfg_.window == 0 || cfg_.negatives == 0 || cfg_.epochs == 0)
            throw Error(ErrorCode::domain_error, "dim, window, negatives, epochs must be >= 1");
        if (cfg_.lr0 <= 0) throw Error(ErrorCode::domain_error, "lr0 must be positive");
        // Sentences mapped to vocabulary indices; OOV tokens dropped.
        for (const auto& sentence : corpus.sentences) {
            std::vector<std::size_t> ids;
            ids.reserve(sentence.size());
            for (const auto& term : sentence)
                if (auto idx = vocab_.index_of(term)) ids.push_back(*idx);
            if (!ids.empty()) sentences_.push_back(std::move(ids));
        }
        init_weights();
    }

    const Vocabulary& vocab() const noexcept { return vocab_; }

    KeyedVectors train() {
        const std::size_t total_words = cfg_.epochs * vocab_.corpus_tokens();
        words_done_ = 0;
        if (cfg_.workers <= 1) {
            run_worker(0, 0, sentences_.size(), total_words);
        } else {
            std::vector<std::thread> pool;
            const std::size_t per = (sentences_.size() + cfg_.workers - 1) / cfg_.workers;
            for (std::size_t w = 0; w < cfg_.workers; ++w) {
                std::size_t begin = std::min(w * per, sentences_.size());
                std::size_t end = std::min(begin + per, sentences_.size());
                pool.emplace_back([this, w, begin, end, total_words] {
                    run_worker(w, begin, end, total_words);
                });
            }
            for (auto& t : pool) t.join();
        }
        std::vector<double> matrix = input_;
        return KeyedVectors(vocab_.terms(), std::move(matrix), cfg_.dim);
    }

    double learning_rate(std::size_t words_done, std::size_t total_words) const {
        const double floor = cfg_.lr0 * 1e-4;
        double lr = cfg_.lr0 * (1.0 - static_cast<double>(words_done) / static_cast<double>(total_words));
        return std::max(lr, floor);
    }

private:
    void init_weights() {
        input_.resize(vocab_.size() * cfg_.dim);
        output_.assign(vocab_.size() * cfg_.dim, 0.0);
        detail::Splitmix64 rng(cfg_.seed);
        const double half = 0.5 / static_cast<double>(cfg_.dim);
        for (auto& x : input_) x = (rng.uniform() - 0.5) * 2.0 * half;
    }

    void run_worker(std::size_t worker, std::size_t begin, std::size_t end,
                    std::size_t total_words) {
        detail::Splitmix64 rng(cfg_.seed * 0x9E3779B97F4A7C15ull + worker + 1);
        std::vector<double> accum(cfg_.dim);
        std::vector<std::size_t> sentence;
        const double corpus_n = static_cast<double>(vocab_.corpus_tokens());
        for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
            for (std::size_t s = begin; s < end; ++s) {
                const auto& raw = sentences_[s];
                sentence.clear();
                for (std::size_t id : raw) {
                    words_done_.fetch_add(1, std::memory_order_relaxed);
                    if (cfg_.subsample > 0) {
                        double f = static_cast<double>(vocab_.count(id)) / corpus_n;
                        if (rng.uniform() >= subsample_keep_prob(f, cfg_.subsample)) continue;
                    }
                    sentence.push_back(id);
                }
                const double lr = learning_rate(
                    words_done_.load(std::memory_order_relaxed), total_words);
                for (std::size_t i = 0; i < sentence.size(); ++i) {
                    const std::size_t b = rng.one_to(cfg_.window);
                    const std::size_t lo = i >= b ? i - b : 0;
                    const std::size_t hi = std::min(sentence.size() - 1, i + b);
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        train_pair(sentence[i], sentence[j], lr, rng, accum);
                    }
                }
            }
        }
    }

    void train_pair(std::size_t center, std::size_t context, double lr,
                    detail::Splitmix64& rng, std::vector<double>& accum) {
        double* v = input_.data() + center * cfg_.dim;
        std::fill(accum.begin(), accum.end(), 0.0);
        for (std::size_t k = 0; k <= cfg_.negatives; ++k) {
            std::size_t target;
            double label;
            if (k == 0) {
                target = context;
                label = 1.0;
            } else {
                target = vocab_.sample_noise(rng);
                int attempts = 0;
                while (target == context && ++attempts <= 100) target = vocab_.sample_noise(rng);
                if (target == context) continue;  // tiny vocabulary, give up on this negative
                label = 0.0;
            }
            double* u = output_.data() + target * cfg_.dim;
            double z = 0;
            for (std::size_t d = 0; d < cfg_.dim; ++d) z += u[d] * v[d];
            const double g = sigmoid(z) - label;
            for (std::size_t d = 0; d < cfg_.dim; ++d) {
                accum[d] += g * u[d];
                u[d] -= lr * g * v[d];
            }
        }
        for (std::size_t d = 0; d < cfg_.dim; ++d) v[d] -= lr * accum[d];
    }

    TrainingConfig cfg_;
    Vocabulary vocab_;
    std::vector<std::vector<std::size_t>> sentences_;
    std::vector<double> input_;
    std::vector<double> output_;
    std::atomic<std::size_t> words_done_{0};
};

inline KeyedVectors train(const NormalizedCorpus& corpus, const TrainingConfig& cfg) {
    return SgnsTrainer(corpus, cfg).train();
}

}  // namespace patanalog
