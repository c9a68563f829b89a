#include <catch2/catch_amalgamated.hpp>

#include "patanalog/trainer.hpp"

#include "helpers.hpp"

using namespace patanalog;

namespace {

NormalizedCorpus counted_corpus(std::initializer_list<std::pair<std::string, int>> counts) {
    NormalizedCorpus corpus;
    std::vector<std::string> sentence;
    for (const auto& [term, count] : counts)
        for (int i = 0; i < count; ++i) sentence.push_back(term);
    corpus.sentences.push_back(std::move(sentence));
    corpus.recount();
    return corpus;
}

}  // namespace

TEST_CASE("build_vocab filters by min_count and orders by count then term") {
    auto corpus = counted_corpus({{"a", 5}, {"b", 2}, {"c", 1}});
    TrainingConfig cfg;
    cfg.min_count = 2;
    auto vocab = build_vocab(corpus, cfg);
    REQUIRE(vocab.size() == 2);
    CHECK(vocab.terms()[0] == "a");
    CHECK(vocab.terms()[1] == "b");
    CHECK(*vocab.index_of("a") == 0);
    CHECK(!vocab.index_of("c"));
}

TEST_CASE("build_vocab ties break lexicographically") {
    auto corpus = counted_corpus({{"z", 3}, {"m", 3}, {"a", 3}});
    TrainingConfig cfg;
    cfg.min_count = 1;
    auto vocab = build_vocab(corpus, cfg);
    CHECK(vocab.terms() == std::vector<std::string>{"a", "m", "z"});
}

TEST_CASE("build_vocab on an empty corpus raises EmptyVocabulary") {
    NormalizedCorpus corpus;
    TrainingConfig cfg;
    cfg.min_count = 1;
    try {
        build_vocab(corpus, cfg);
        FAIL("expected EmptyVocabulary");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::empty_vocabulary);
    }
}

TEST_CASE("noise distribution normalizes count^power") {
    auto corpus = counted_corpus({{"a", 3}, {"b", 1}});
    TrainingConfig cfg;
    cfg.min_count = 1;
    cfg.noise_power = 1.0;
    auto vocab = build_vocab(corpus, cfg);
    CHECK(vocab.noise_probability(*vocab.index_of("a")) == Catch::Approx(0.75).epsilon(1e-9));
    CHECK(vocab.noise_probability(*vocab.index_of("b")) == Catch::Approx(0.25).epsilon(1e-9));
    double sum = 0;
    for (std::size_t i = 0; i < vocab.size(); ++i) sum += vocab.noise_probability(i);
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("noise table statistics: 1e6 draws land within 0.01") {
    auto corpus = counted_corpus({{"a", 3}, {"b", 1}});
    TrainingConfig cfg;
    cfg.min_count = 1;
    cfg.noise_power = 1.0;
    auto vocab = build_vocab(corpus, cfg);
    detail::Splitmix64 rng(42);
    const std::size_t a_idx = *vocab.index_of("a");
    std::size_t hits = 0;
    const std::size_t draws = 1'000'000;
    for (std::size_t i = 0; i < draws; ++i)
        if (vocab.sample_noise(rng) == a_idx) ++hits;
    double freq = static_cast<double>(hits) / draws;
    CHECK(std::abs(freq - 0.75) < 0.01);
}

TEST_CASE("subsample_keep_prob formula") {
    CHECK(subsample_keep_prob(0.001, 0.001) == Catch::Approx(1.0));
    CHECK(subsample_keep_prob(0.01, 0.001) == Catch::Approx(std::sqrt(0.1)).epsilon(1e-12));
    CHECK(subsample_keep_prob(0.5, 0.0) == 1.0);  // t = 0 turns the feature off
    CHECK(subsample_keep_prob(1e-9, 0.001) == 1.0);
    CHECK_THROWS_AS(subsample_keep_prob(0.0, 0.001), Error);
    CHECK_THROWS_AS(subsample_keep_prob(1.5, 0.001), Error);
}

TEST_CASE("sgns_loss on zero vectors is 2 log 2") {
    std::vector<double> v(4, 0.0), u(4, 0.0);
    std::vector<std::vector<double>> negs{std::vector<double>(4, 0.0)};
    CHECK(sgns_loss(v, u, negs) == Catch::Approx(2 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("sgns_loss tends to zero for confident predictions") {
    std::vector<double> v{50.0, 0.0};
    std::vector<double> u_pos{1.0, 0.0};
    std::vector<std::vector<double>> negs{{-1.0, 0.0}};
    CHECK(sgns_loss(v, u_pos, negs) < 1e-15);
}

TEST_CASE("sgns_loss rejects dimension mismatch") {
    std::vector<double> v(4, 0.1), u(3, 0.1);
    CHECK_THROWS_AS(sgns_loss(v, u, {}), Error);
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    const std::size_t d = 8, K = 3;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(d), u_pos(d);
        std::vector<std::vector<double>> u_negs(K, std::vector<double>(d));
        for (auto& x : v) x = coord(rng);
        for (auto& x : u_pos) x = coord(rng);
        for (auto& u : u_negs)
            for (auto& x : u) x = coord(rng);
        auto g = sgns_gradients(v, u_pos, u_negs);
        for (std::size_t c = 0; c < d; ++c) {
            double fd = testutil::finite_difference(v, u_pos, u_negs, 0, c);
            CHECK(std::abs(g.d_v[c] - fd) / std::max(1.0, std::abs(fd)) < 1e-4);
            fd = testutil::finite_difference(v, u_pos, u_negs, 1, c);
            CHECK(std::abs(g.d_u_pos[c] - fd) / std::max(1.0, std::abs(fd)) < 1e-4);
            for (std::size_t k = 0; k < K; ++k) {
                fd = testutil::finite_difference(v, u_pos, u_negs, 2 + static_cast<int>(k), c);
                CHECK(std::abs(g.d_u_negs[k][c] - fd) / std::max(1.0, std::abs(fd)) < 1e-4);
            }
        }
    }
}

TEST_CASE("learning rate decays linearly and never drops below the floor") {
    auto corpus = counted_corpus({{"a", 10}, {"b", 10}});
    TrainingConfig cfg;
    cfg.min_count = 1;
    SgnsTrainer trainer(corpus, cfg);
    const std::size_t total = 1000;
    double prev = trainer.learning_rate(0, total);
    CHECK(prev == Catch::Approx(cfg.lr0));
    for (std::size_t w = 1; w <= 2 * total; w += 50) {
        double lr = trainer.learning_rate(w, total);
        CHECK(lr <= prev);
        CHECK(lr >= cfg.lr0 * 1e-4 - 1e-15);
        prev = lr;
    }
    CHECK(trainer.learning_rate(total, total) == Catch::Approx(cfg.lr0 * 1e-4));
}

TEST_CASE("deterministic mode: identical seeds give bitwise-identical models") {
    auto fx = testutil::make_cluster_fixture(3, 2, 10);
    std::vector<ExtractedText> docs = fx.cluster1;
    auto corpus = build_corpus(docs, {}, PhraseConfig{1.0, 10.0, 2});
    TrainingConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 3;
    cfg.min_count = 1;
    cfg.seed = 777;
    cfg.workers = 1;
    auto a = train(corpus, cfg);
    auto b = train(corpus, cfg);
    CHECK(serialize_model(a) == serialize_model(b));
}

TEST_CASE("trained vectors are finite") {
    auto fx = testutil::make_cluster_fixture(9, 2, 20);
    std::vector<ExtractedText> docs = fx.cluster1;
    docs.insert(docs.end(), fx.cluster2.begin(), fx.cluster2.end());
    auto corpus = build_corpus(docs, {}, PhraseConfig{1.0, 10.0, 2});
    TrainingConfig cfg;
    cfg.dim = 12;
    cfg.epochs = 2;
    cfg.min_count = 1;
    auto model = train(corpus, cfg);
    for (std::size_t i = 0; i < model.size(); ++i)
        for (double x : model.row(i)) CHECK(std::isfinite(x));
}

TEST_CASE("two disjoint topic clusters separate after training") {
    int successes = 0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        auto fx = testutil::make_cluster_fixture(seed, 5, 40);
        std::vector<ExtractedText> docs = fx.cluster1;
        docs.insert(docs.end(), fx.cluster2.begin(), fx.cluster2.end());
        auto corpus = build_corpus(docs, {}, PhraseConfig{1.0, 1e9, 1});
        TrainingConfig cfg;
        cfg.dim = 24;
        cfg.epochs = 15;
        cfg.min_count = 1;
        cfg.subsample = 0;
        cfg.seed = seed;
        auto model = train(corpus, cfg);
        double intra = 0, cross = 0;
        int n_intra = 0, n_cross = 0;
        auto& c1 = testutil::cluster1_words();
        auto& c2 = testutil::cluster2_words();
        for (const auto& a : c1)
            for (const auto& b : c1)
                if (a < b) { intra += similarity(model, a, b); ++n_intra; }
        for (const auto& a : c2)
            for (const auto& b : c2)
                if (a < b) { intra += similarity(model, a, b); ++n_intra; }
        for (const auto& a : c1)
            for (const auto& b : c2) { cross += similarity(model, a, b); ++n_cross; }
        if (intra / n_intra > cross / n_cross) ++successes;
    }
    CHECK(successes == 5);
}

TEST_CASE("parallel mode produces a usable model") {
    auto fx = testutil::make_cluster_fixture(31, 4, 30);
    std::vector<ExtractedText> docs = fx.cluster1;
    docs.insert(docs.end(), fx.cluster2.begin(), fx.cluster2.end());
    auto corpus = build_corpus(docs, {}, PhraseConfig{1.0, 1e9, 1});
    TrainingConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 4;
    cfg.min_count = 1;
    cfg.workers = 4;
    auto model = train(corpus, cfg);
    CHECK(model.size() == 16);
    for (std::size_t i = 0; i < model.size(); ++i)
        for (double x : model.row(i)) CHECK(std::isfinite(x));
}
