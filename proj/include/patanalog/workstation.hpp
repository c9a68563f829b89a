#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include "patanalog/clp.hpp"
#include "patanalog/error.hpp"
#include "patanalog/store.hpp"
#include "patanalog/trainer.hpp"
#include "patanalog/vectors.hpp"

namespace patanalog {

/// key = value file, '#' starts a comment line.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::not_found, "config file '" + path + "' not readable");
    std::map<std::string, std::string> out;
    std::string line;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = value;
    }
    return out;
}

struct WorkstationConfig {
    std::string store_root = "data";
    std::string stoplist_path;
    std::string lemma_dict_path;
    std::string pos_dict_path;
    std::string listen_addr = "127.0.0.1:8080";
    PhraseConfig phrase;
    TrainingConfig training;

    static WorkstationConfig from_map(const std::map<std::string, std::string>& kv) {
        WorkstationConfig cfg;
        auto get = [&](const char* key, auto& slot) {
            auto it = kv.find(key);
            if (it == kv.end()) return;
            using T = std::decay_t<decltype(slot)>;
            if constexpr (std::is_same_v<T, std::string>) slot = it->second;
            else if constexpr (std::is_same_v<T, double>) slot = std::stod(it->second);
            else if constexpr (std::is_same_v<T, int>) slot = std::stoi(it->second);
            else slot = static_cast<T>(std::stoull(it->second));
        };
        get("store_root", cfg.store_root);
        get("stoplist", cfg.stoplist_path);
        get("lemma_dict", cfg.lemma_dict_path);
        get("pos_dict", cfg.pos_dict_path);
        get("listen_addr", cfg.listen_addr);
        get("phrase_delta", cfg.phrase.delta);
        get("phrase_threshold", cfg.phrase.threshold);
        get("phrase_max_passes", cfg.phrase.max_passes);
        get("dim", cfg.training.dim);
        get("window", cfg.training.window);
        get("negatives", cfg.training.negatives);
        get("epochs", cfg.training.epochs);
        get("lr0", cfg.training.lr0);
        get("min_count", cfg.training.min_count);
        get("subsample", cfg.training.subsample);
        get("noise_power", cfg.training.noise_power);
        get("seed", cfg.training.seed);
        get("workers", cfg.training.workers);
        return cfg;
    }
};

/// Shared mutable state of one workstation instance: the store, the CLP
/// resources, the serving model and the last built corpus.
class Workstation {
public:
    explicit Workstation(WorkstationConfig cfg)
        : cfg_(std::move(cfg)), store_(cfg_.store_root) {
        if (!cfg_.stoplist_path.empty()) resources_.stoplist = load_stoplist(cfg_.stoplist_path);
        if (!cfg_.lemma_dict_path.empty())
            resources_.lemma_dictionary = load_lemma_dictionary(cfg_.lemma_dict_path);
        if (!cfg_.pos_dict_path.empty())
            resources_.pos_dictionary = load_pos_dictionary(cfg_.pos_dict_path);
    }

    const WorkstationConfig& config() const noexcept { return cfg_; }
    WorkstationConfig& config() noexcept { return cfg_; }
    DocumentStore& store() noexcept { return store_; }
    const ClpResources& resources() const noexcept { return resources_; }
    ClpResources& resources() noexcept { return resources_; }

    std::filesystem::path corpus_path() const { return store_.root() / "corpus.txt"; }
    std::filesystem::path default_model_path() const { return store_.root() / "models" / "model.vec"; }

    bool has_model() const {
        std::lock_guard lock(mutex_);
        return model_ != nullptr;
    }

    std::shared_ptr<const KeyedVectors> model() const {
        std::lock_guard lock(mutex_);
        if (!model_) throw Error(ErrorCode::domain_error, "no model initialized; run model init first");
        return model_;
    }

    void set_model(KeyedVectors model) {
        auto ptr = std::make_shared<const KeyedVectors>(std::move(model));
        std::lock_guard lock(mutex_);
        model_ = std::move(ptr);
    }

    bool has_corpus() const {
        std::lock_guard lock(mutex_);
        return corpus_.has_value();
    }

    NormalizedCorpus corpus() const {
        std::lock_guard lock(mutex_);
        if (!corpus_) throw Error(ErrorCode::domain_error, "no corpus built; run corpus build first");
        return *corpus_;
    }

    void set_corpus(NormalizedCorpus corpus) {
        std::lock_guard lock(mutex_);
        corpus_ = std::move(corpus);
    }

    /// Persists the corpus next to the store and caches it in memory.
    void save_corpus(const NormalizedCorpus& corpus) {
        std::ofstream out(corpus_path(), std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::storage_corruption, "cannot write corpus file");
        out << serialize_corpus(corpus);
        set_corpus(corpus);
    }

    /// Cached corpus, or the persisted corpus file if present.
    NormalizedCorpus load_corpus() {
        {
            std::lock_guard lock(mutex_);
            if (corpus_) return *corpus_;
        }
        std::ifstream in(corpus_path(), std::ios::binary);
        if (!in) throw Error(ErrorCode::not_found, "no corpus built; run corpus build first");
        std::ostringstream buf;
        buf << in.rdbuf();
        auto corpus = parse_corpus(buf.str());
        set_corpus(corpus);
        return corpus;
    }

private:
    WorkstationConfig cfg_;
    DocumentStore store_;
    ClpResources resources_;
    std::shared_ptr<const KeyedVectors> model_;
    std::optional<NormalizedCorpus> corpus_;
    mutable std::mutex mutex_;
};

}  // namespace patanalog
