#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "patanalog/coordinator.hpp"
#include "patanalog/error.hpp"
#include "patanalog/ingest.hpp"
#include "patanalog/patent_search.hpp"
#include "patanalog/workstation.hpp"

namespace patanalog {

inline int http_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::unknown_term:
        case ErrorCode::not_found:
        case ErrorCode::unknown_function:
        case ErrorCode::unknown_service_id:
            return 404;
        case ErrorCode::not_executable:
            return 409;
        case ErrorCode::stage_error:
        case ErrorCode::storage_corruption:
            return 500;
        case ErrorCode::unsupported_format:
        case ErrorCode::encoding_error:
        case ErrorCode::malformed_model_file:
            return 400;
        default:
            return 422;  // domain errors: EmptyTermArray, LanguageMismatch, ...
    }
}

/// JSON front door over the coordinator and the module operations.
class ApiServer {
public:
    explicit ApiServer(Coordinator& coordinator) : coordinator_(coordinator) {
        install_routes();
    }

    httplib::Server& server() noexcept { return server_; }

    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    /// Binds to an OS-chosen port and serves on a background thread.
    /// Returns the port. Used by tests and `serve` alike.
    int listen_background(const std::string& host) {
        int port = server_.bind_to_any_port(host);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port;
    }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    ~ApiServer() { stop(); }

private:
    Workstation& ws() { return coordinator_.workstation(); }

    template <typename Fn>
    void handle(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            res.status = http_status_for(e.code());
            res.set_content(
                json{{"error", error_code_name(e.code())},
                     {"message", e.what()},
                     {"details", e.details()}}
                    .dump(),
                "application/json");
        } catch (const json::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", "MalformedEnvelope"}, {"message", e.what()}}.dump(),
                            "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(json{{"error", "Internal"}, {"message", e.what()}}.dump(),
                            "application/json");
        }
    }

    static json parse_body(const httplib::Request& req) {
        // json::exception maps to 400 in handle()
        return json::parse(req.body);
    }

    void reply(httplib::Response& res, const json& body, int status = 200) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    void install_routes() {
        server_.Post("/documents", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                json body = parse_body(req);
                RawDocument raw;
                raw.id = body.at("id").get<std::string>();
                const std::string text = body.at("text").get<std::string>();
                raw.payload.assign(text.begin(), text.end());
                raw.declared_format = format_from_string(body.value("format", "plain_text"));
                raw.declared_encoding = encoding_from_string(body.value("encoding", "utf8"));
                auto extracted = extract_text(raw);
                json doc{{"doc_id", extracted.doc_id},
                         {"text", extracted.text},
                         {"language", to_string(extracted.language)},
                         {"title", body.value("title", "")},
                         {"ipc_class", body.value("ipc_class", "")}};
                ws().store().put(kDocumentCollection, extracted.doc_id, doc);
                reply(res,
                      json{{"doc_id", extracted.doc_id},
                           {"language", to_string(extracted.language)},
                           {"chars", extracted.text.size()}},
                      201);
            });
        });

        server_.Post("/corpus/build", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                json task = parse_body(req);
                json envelope = coordinator_.execute_function("C_4", task);
                reply(res, envelope.at("result"));
            });
        });

        server_.Post("/model/train", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                json body = parse_body(req);
                bool expected = false;
                if (!training_.compare_exchange_strong(expected, true))
                    throw Error(ErrorCode::domain_error, "a training run is already in progress");
                TrainingConfig cfg = ws().config().training;
                cfg.dim = body.value("dim", cfg.dim);
                cfg.window = body.value("window", cfg.window);
                cfg.negatives = body.value("negatives", cfg.negatives);
                cfg.epochs = body.value("epochs", cfg.epochs);
                cfg.lr0 = body.value("lr0", cfg.lr0);
                cfg.min_count = body.value("min_count", cfg.min_count);
                cfg.subsample = body.value("subsample", cfg.subsample);
                cfg.noise_power = body.value("noise_power", cfg.noise_power);
                cfg.seed = body.value("seed", cfg.seed);
                cfg.workers = body.value("workers", cfg.workers);
                NormalizedCorpus corpus = ws().load_corpus();
                train_error_.clear();
                train_thread_ = std::thread([this, corpus = std::move(corpus), cfg] {
                    try {
                        auto model = train(corpus, cfg);
                        auto path = ws().default_model_path();
                        std::filesystem::create_directories(path.parent_path());
                        save_model(model, path.string());
                        ws().set_model(std::move(model));
                        model_path_ = path.string();
                    } catch (const std::exception& e) {
                        std::lock_guard lock(train_mutex_);
                        train_error_ = e.what();
                    }
                    training_ = false;
                });
                train_thread_.detach();
                reply(res, json{{"status", "training"}}, 202);
            });
        });

        server_.Get("/model/status", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                std::string err;
                {
                    std::lock_guard lock(train_mutex_);
                    err = train_error_;
                }
                json body{{"training", training_.load()},
                          {"model_initialized", ws().has_model()},
                          {"model_path", model_path_}};
                if (!err.empty()) body["error"] = err;
                reply(res, body);
            });
        });

        server_.Post("/model/init", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                json body = parse_body(req);
                std::string path = body.value("model_path", ws().default_model_path().string());
                ws().set_model(load_model(path));
                model_path_ = path;
                auto model = ws().model();
                reply(res, json{{"terms", model->size()}, {"dim", model->dim()}});
            });
        });

        server_.Get("/similarity", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                if (!req.has_param("a") || !req.has_param("b"))
                    throw Error(ErrorCode::domain_error, "parameters a and b are required");
                coordinator_.ensure_model();
                auto model = ws().model();
                reply(res, json{{"score", similarity(*model, req.get_param_value("a"),
                                                     req.get_param_value("b"))}});
            });
        });

        server_.Get("/associates", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                if (!req.has_param("term"))
                    throw Error(ErrorCode::domain_error, "parameter term is required");
                std::size_t k = req.has_param("k") ? std::stoull(req.get_param_value("k")) : 10;
                coordinator_.ensure_model();
                auto model = ws().model();
                json items = json::array();
                for (const auto& hit : most_similar(*model, req.get_param_value("term"), k))
                    items.push_back({{"term", hit.term}, {"score", hit.score}});
                reply(res, json{{"associates", items}});
            });
        });

        server_.Post("/n-similarity", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                json body = parse_body(req);
                coordinator_.ensure_model();
                auto model = ws().model();
                reply(res, json{{"score", n_similarity(
                                              *model,
                                              body.at("set_a").get<std::vector<std::string>>(),
                                              body.at("set_b").get<std::vector<std::string>>())}});
            });
        });

        server_.Post("/cluster-center", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                json body = parse_body(req);
                coordinator_.ensure_model();
                auto model = ws().model();
                reply(res, json{{"center", cluster_center(
                                               *model,
                                               body.at("terms").get<std::vector<std::string>>())}});
            });
        });

        server_.Post("/search", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                json body = parse_body(req);
                coordinator_.ensure_model();
                coordinator_.ensure_indexed();
                auto model = ws().model();
                RawDocument raw;
                raw.id = body.value("id", std::string("query"));
                const std::string text = body.at("text").get<std::string>();
                raw.payload.assign(text.begin(), text.end());
                auto query = extract_text(raw);
                auto result = search_analogs(ws().store(), *model, query,
                                             body.value("k", std::size_t{10}), ws().resources());
                reply(res, result.to_json());
            });
        });

        server_.Post(R"(/functions/([A-Za-z0-9_]+)/execute)",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         handle(req, res, [&] {
                             json task = req.body.empty() ? json::object() : parse_body(req);
                             reply(res, coordinator_.execute_function(req.matches[1], task));
                         });
                     });

        server_.Get("/functions", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res, [&] {
                json services = json::object();
                for (const auto& [sid, desc] : coordinator_.registry().services())
                    services[sid.name()] = {{"status", to_string(desc.status)}};
                json functions = json::object();
                for (const auto& [fid, def] : coordinator_.registry().functions()) {
                    json members = json::array();
                    for (const auto& sid : def.services) members.push_back(sid.name());
                    json missing = json::array();
                    for (const auto& sid : coordinator_.registry().missing_services(def))
                        missing.push_back(sid.name());
                    functions[fid] = {{"services", members},
                                      {"executable", def.executable},
                                      {"missing", missing}};
                }
                reply(res, json{{"services", services}, {"functions", functions}});
            });
        });
    }

    Coordinator& coordinator_;
    httplib::Server server_;
    std::thread thread_;
    std::thread train_thread_;
    std::atomic<bool> training_{false};
    std::mutex train_mutex_;
    std::string train_error_;
    std::string model_path_;
};

}  // namespace patanalog
