#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "patanalog/error.hpp"
#include "patanalog/ingest.hpp"
#include "patanalog/patent_search.hpp"
#include "patanalog/workstation.hpp"

namespace patanalog {

inline constexpr std::size_t kAtomicServiceCount = 24;  // m
inline constexpr std::size_t kBuiltinFunctionCount = 7;  // n

/// aws_1 .. aws_24.
class ServiceId {
public:
    explicit ServiceId(std::size_t number) : number_(number) {
        if (number < 1 || number > kAtomicServiceCount)
            throw Error(ErrorCode::unknown_service_id,
                        "service number " + std::to_string(number) + " outside aws_1..aws_24");
    }

    static ServiceId parse(const std::string& name) {
        if (name.rfind("aws_", 0) != 0)
            throw Error(ErrorCode::unknown_service_id, "bad service id '" + name + "'");
        std::size_t number = 0;
        try {
            number = std::stoull(name.substr(4));
        } catch (const std::exception&) {
            throw Error(ErrorCode::unknown_service_id, "bad service id '" + name + "'");
        }
        return ServiceId(number);
    }

    std::size_t number() const noexcept { return number_; }
    std::string name() const { return "aws_" + std::to_string(number_); }

    auto operator<=>(const ServiceId&) const = default;

private:
    std::size_t number_;
};

enum class ServiceStatus { local, declared_external, unavailable };

inline const char* to_string(ServiceStatus s) {
    switch (s) {
        case ServiceStatus::local: return "local";
        case ServiceStatus::declared_external: return "declared_external";
        case ServiceStatus::unavailable: return "unavailable";
    }
    return "unavailable";
}

struct ServiceDescriptor {
    ServiceStatus status = ServiceStatus::unavailable;
    std::optional<std::string> endpoint;
};

struct FunctionDef {
    std::string id;
    std::set<ServiceId> services;
    bool executable = false;
};

/// crd bookkeeping: every one of the 24 atomic services always has a
/// status; function definitions are validated against the set.
class ServiceRegistry {
public:
    ServiceRegistry() {
        for (std::size_t i = 1; i <= kAtomicServiceCount; ++i)
            services_.emplace(ServiceId(i), ServiceDescriptor{});
    }

    /// Registry with the default service placement and the seven
    /// built-in composite functions.
    static ServiceRegistry make_default() {
        ServiceRegistry reg;
        // aws_24 is the artifact's own HTTP/CLI layer; aws_20's batch
        // CLP role is covered by the clp module.
        for (std::size_t n : {1, 2, 3, 5, 8, 9, 10, 11, 12, 13, 17, 20, 21, 23, 24})
            reg.register_service(ServiceId(n), {ServiceStatus::local, std::nullopt});
        for (std::size_t n : {4, 6, 7, 14, 15, 16, 18, 19, 22})
            reg.register_service(ServiceId(n), {ServiceStatus::declared_external, std::nullopt});
        auto def = [&](const std::string& id, std::initializer_list<std::size_t> numbers) {
            std::set<ServiceId> s;
            for (auto n : numbers) s.insert(ServiceId(n));
            reg.define_function(id, s);
        };
        def("C_1", {1, 3, 5, 6, 8, 9, 11, 12, 14, 16, 20});
        def("C_2", {1, 9, 11, 13, 15, 18, 22, 24});
        def("C_3", {1, 9, 11, 13, 15, 18, 22});
        def("C_4", {1, 3, 5, 8, 12, 20, 24});
        def("C_5", {21, 24});
        def("C_6", {1, 3, 8, 14, 20, 24});
        def("C_7", {1, 3, 21, 23, 24});
        return reg;
    }

    void register_service(const ServiceId& id, ServiceDescriptor descriptor) {
        services_[id] = std::move(descriptor);
        // statuses feed the executable flag, so recompute
        for (auto& [fid, fdef] : functions_) fdef.executable = all_local(fdef.services);
    }

    const ServiceDescriptor& descriptor(const ServiceId& id) const { return services_.at(id); }

    const std::map<ServiceId, ServiceDescriptor>& services() const noexcept { return services_; }

    FunctionDef define_function(const std::string& id, const std::set<ServiceId>& services) {
        if (services.empty())
            throw Error(ErrorCode::empty_service_set, "function '" + id + "' must use at least one service");
        FunctionDef def{id, services, all_local(services)};
        functions_[id] = def;
        return def;
    }

    const FunctionDef& function(const std::string& id) const {
        auto it = functions_.find(id);
        if (it == functions_.end())
            throw Error(ErrorCode::unknown_function, "no function '" + id + "'");
        return it->second;
    }

    const std::map<std::string, FunctionDef>& functions() const noexcept { return functions_; }

    std::vector<ServiceId> missing_services(const FunctionDef& def) const {
        std::vector<ServiceId> missing;
        for (const auto& sid : def.services)
            if (services_.at(sid).status != ServiceStatus::local) missing.push_back(sid);
        return missing;
    }

private:
    bool all_local(const std::set<ServiceId>& services) const {
        return std::all_of(services.begin(), services.end(), [&](const ServiceId& sid) {
            return services_.at(sid).status == ServiceStatus::local;
        });
    }

    std::map<ServiceId, ServiceDescriptor> services_;
    std::map<std::string, FunctionDef> functions_;
};

/// Task routing across the atomic services ("reverse proxy of tasks").
/// Execution records which services each stage ran under, with timing.
class Coordinator {
public:
    Coordinator(ServiceRegistry registry, Workstation& workstation)
        : registry_(std::move(registry)), workstation_(workstation) {
        // structural constants of the model
        if (registry_.services().size() != kAtomicServiceCount)
            throw Error(ErrorCode::unknown_service_id, "registry must cover all 24 services");
    }

    const ServiceRegistry& registry() const noexcept { return registry_; }
    ServiceRegistry& registry() noexcept { return registry_; }
    Workstation& workstation() noexcept { return workstation_; }

    json execute_function(const std::string& function_id, const json& task) {
        const FunctionDef& def = registry_.function(function_id);
        if (!def.executable) {
            std::vector<std::string> names;
            for (const auto& sid : registry_.missing_services(def)) names.push_back(sid.name());
            std::string msg = "function '" + function_id + "' is missing services:";
            for (const auto& n : names) msg += " " + n;
            throw Error(ErrorCode::not_executable, msg, names);
        }
        Execution exec{def, task};
        if (function_id == "C_4") run_c4(exec);
        else if (function_id == "C_5") run_c5(exec);
        else if (function_id == "C_7") run_c7(exec);
        else
            throw Error(ErrorCode::not_executable,
                        "function '" + function_id + "' has no registered pipeline", {});
        return exec.envelope(function_id);
    }

private:
    struct Execution {
        const FunctionDef& def;
        const json& task;
        json result = json::object();
        json stages = json::array();
        std::vector<ServiceId> invoked;

        /// Runs one pipeline stage under a service id; errors are
        /// wrapped with the failing service.
        template <typename Fn>
        void stage(std::size_t service_number, const char* label, Fn&& fn) {
            ServiceId sid(service_number);
            if (!def.services.count(sid))
                throw Error(ErrorCode::stage_error,
                            "stage '" + std::string(label) + "' would invoke " + sid.name() +
                                " outside the declared set of '" + def.id + "'");
            invoked.push_back(sid);
            auto t0 = std::chrono::steady_clock::now();
            try {
                fn();
            } catch (const Error& e) {
                throw Error(ErrorCode::stage_error,
                            std::string(label) + " (" + sid.name() + ") failed: " + e.what(),
                            {sid.name()});
            }
            auto ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
            stages.push_back({{"service", sid.name()}, {"stage", label}, {"ms", ms}});
        }

        json envelope(const std::string& function_id) const {
            static std::atomic<std::uint64_t> counter{0};
            return json{{"correlation_id", function_id + "-" + std::to_string(++counter)},
                        {"function", function_id},
                        {"stages", stages},
                        {"result", result}};
        }
    };

    std::vector<ExtractedText> fetch_documents(const json& task) {
        std::vector<std::string> ids;
        if (task.contains("doc_ids"))
            ids = task.at("doc_ids").get<std::vector<std::string>>();
        else
            ids = workstation_.store().list(kDocumentCollection);
        std::vector<ExtractedText> docs;
        for (const auto& id : ids) {
            auto j = workstation_.store().get(kDocumentCollection, id);
            ExtractedText doc;
            doc.doc_id = j.at("doc_id").get<std::string>();
            doc.text = j.at("text").get<std::string>();
            doc.language = language_from_string(j.value("language", "unknown"));
            docs.push_back(std::move(doc));
        }
        return docs;
    }

    // C_4: automated CLP of stored documents into the normalized corpus.
    void run_c4(Execution& exec) {
        std::vector<ExtractedText> docs;
        exec.stage(1, "fetch_documents", [&] { docs = fetch_documents(exec.task); });
        exec.stage(3, "language_check", [&] {
            std::vector<std::string> offenders;
            for (const auto& d : docs)
                if (d.language != Language::uk) offenders.push_back(d.doc_id);
            if (!offenders.empty())
                throw Error(ErrorCode::language_mismatch, "non-Ukrainian documents", offenders);
        });
        PhraseConfig cfg = workstation_.config().phrase;
        if (exec.task.contains("phrase_config")) {
            const auto& pc = exec.task.at("phrase_config");
            cfg.delta = pc.value("delta", cfg.delta);
            cfg.threshold = pc.value("threshold", cfg.threshold);
            cfg.max_passes = pc.value("max_passes", cfg.max_passes);
        }
        NormalizedCorpus corpus;
        exec.stage(20, "build_corpus", [&] {
            corpus = build_corpus(docs, workstation_.resources(), cfg);
        });
        exec.stage(24, "persist_corpus", [&] { workstation_.save_corpus(corpus); });
        exec.result = {{"sentences", corpus.sentences.size()},
                       {"vocab_size", corpus.vocab_counts.size()},
                       {"total_tokens", corpus.total_tokens}};
    }

    // C_5: distributive-semantic queries over the initialized model.
    void run_c5(Execution& exec) {
        exec.stage(21, "model_query", [&] {
            ensure_model();
            auto model = workstation_.model();
            const std::string op = exec.task.at("op").get<std::string>();
            if (op == "similarity") {
                exec.result = {{"score", similarity(*model, exec.task.at("a").get<std::string>(),
                                                    exec.task.at("b").get<std::string>())}};
            } else if (op == "associates") {
                auto hits = most_similar(*model, exec.task.at("term").get<std::string>(),
                                         exec.task.value("k", std::size_t{10}));
                json items = json::array();
                for (const auto& h : hits) items.push_back({{"term", h.term}, {"score", h.score}});
                exec.result = {{"associates", items}};
            } else if (op == "n_similarity") {
                exec.result = {{"score",
                                n_similarity(*model,
                                             exec.task.at("set_a").get<std::vector<std::string>>(),
                                             exec.task.at("set_b").get<std::vector<std::string>>())}};
            } else if (op == "cluster_center") {
                exec.result = {{"center",
                                cluster_center(*model,
                                               exec.task.at("terms").get<std::vector<std::string>>())}};
            } else {
                throw Error(ErrorCode::domain_error, "unknown model op '" + op + "'");
            }
        });
    }

    // C_7: the full analog-search flow plus application-document fill.
    void run_c7(Execution& exec) {
        ExtractedText query;
        exec.stage(1, "extract_text", [&] {
            RawDocument raw;
            raw.id = exec.task.value("id", std::string("query"));
            const std::string text = exec.task.at("text").get<std::string>();
            raw.payload.assign(text.begin(), text.end());
            query = extract_text(raw);
        });
        exec.stage(3, "language_check", [&] {
            if (query.language != Language::uk)
                throw Error(ErrorCode::language_mismatch,
                            "query language is " + std::string(to_string(query.language)),
                            {query.doc_id});
        });
        SearchResult search;
        exec.stage(21, "model_search", [&] {
            ensure_model();
            ensure_indexed();
            search = search_analogs(workstation_.store(), *workstation_.model(), query,
                                    exec.task.value("k", std::size_t{10}),
                                    workstation_.resources());
        });
        std::string document;
        exec.stage(23, "fill_template", [&] {
            std::string tmpl = exec.task.value(
                "template",
                std::string("Заявка: {{query_id}}\nНайближчі аналоги:\n{{analogs}}\n"));
            std::map<std::string, std::string> fields;
            if (exec.task.contains("fields"))
                fields = exec.task.at("fields").get<std::map<std::string, std::string>>();
            fields.emplace("query_id", search.query_id);
            std::string analogs;
            char buf[64];
            for (const auto& r : search.results) {
                std::snprintf(buf, sizeof buf, "%.6f", r.score);
                analogs += "- " + r.patent_id + " (" + buf + ", " + to_string(r.verdict) + ")\n";
            }
            fields.emplace("analogs", analogs);
            if (!search.results.empty()) {
                fields.emplace("top_analog_id", search.results.front().patent_id);
                std::snprintf(buf, sizeof buf, "%.6f", search.results.front().score);
                fields.emplace("top_score", buf);
            }
            document = fill_template(tmpl, fields);
        });
        exec.stage(24, "assemble_response", [&] {
            exec.result = {{"search", search.to_json()}, {"document", document}};
        });
    }

public:
    /// Loads the saved model, or trains one from the corpus when no
    /// saved model exists yet.
    void ensure_model() {
        if (workstation_.has_model()) return;
        auto path = workstation_.default_model_path();
        if (std::filesystem::exists(path)) {
            workstation_.set_model(load_model(path.string()));
            return;
        }
        auto corpus = workstation_.load_corpus();
        auto model = train(corpus, workstation_.config().training);
        std::filesystem::create_directories(path.parent_path());
        save_model(model, path.string());
        workstation_.set_model(std::move(model));
    }

    /// Indexes stored documents that have no patent record yet.
    void ensure_indexed() {
        auto& store = workstation_.store();
        auto model = workstation_.model();
        for (const auto& id : store.list(kDocumentCollection)) {
            if (store.contains(kPatentCollection, id)) continue;
            auto j = store.get(kDocumentCollection, id);
            ExtractedText doc;
            doc.doc_id = j.at("doc_id").get<std::string>();
            doc.text = j.at("text").get<std::string>();
            doc.language = language_from_string(j.value("language", "unknown"));
            PatentMetadata meta;
            meta.title = j.value("title", "");
            meta.ipc_class = j.value("ipc_class", "");
            index_patent(store, *model, doc, meta, workstation_.resources());
        }
    }

private:
    ServiceRegistry registry_;
    Workstation& workstation_;
};

}  // namespace patanalog
