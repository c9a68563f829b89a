#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patanalog/patanalog.hpp"

namespace pa = patanalog;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pa::Error(pa::ErrorCode::not_found, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::pair<std::string, int> split_addr(const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos)
        throw pa::Error(pa::ErrorCode::domain_error, "address must be HOST:PORT");
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
}

pa::ExtractedText ingest_file(pa::Workstation& ws, const std::string& path,
                              const std::string& encoding) {
    pa::RawDocument raw;
    raw.id = std::filesystem::path(path).stem().string();
    auto bytes = read_file(path);
    raw.payload.assign(bytes.begin(), bytes.end());
    raw.declared_encoding = pa::encoding_from_string(encoding);
    auto extracted = pa::extract_text(raw);
    ws.store().put(pa::kDocumentCollection, extracted.doc_id,
                   pa::json{{"doc_id", extracted.doc_id},
                            {"text", extracted.text},
                            {"language", to_string(extracted.language)},
                            {"title", raw.id},
                            {"ipc_class", ""}});
    return extracted;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patent analog search workstation"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file");

    // config overrides, applied after the config file is read
    std::map<std::string, std::string> overrides;
    auto add_override = [&](const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(
            "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
    };
    add_override("store_root", "store root directory");
    add_override("stoplist", "stop-word list file");
    add_override("lemma_dict", "surface<TAB>lemma dictionary");
    add_override("pos_dict", "lemma<TAB>pos dictionary");
    add_override("listen_addr", "HOST:PORT for serve");

    auto* ingest_cmd = app.add_subcommand("ingest", "ingest plain-text patent files");
    std::vector<std::string> ingest_files;
    std::string ingest_encoding = "utf8";
    ingest_cmd->add_option("files", ingest_files, "input files")->required();
    ingest_cmd->add_option("--encoding", ingest_encoding, "utf8 or win1251");

    auto* corpus_cmd = app.add_subcommand("corpus", "corpus operations");
    auto* corpus_build = corpus_cmd->add_subcommand("build", "build the normalized corpus");
    double phrase_delta = -1, phrase_threshold = -1;
    int phrase_passes = -1;
    corpus_build->add_option("--delta", phrase_delta, "phrase score discount");
    corpus_build->add_option("--threshold", phrase_threshold, "phrase merge threshold");
    corpus_build->add_option("--max-passes", phrase_passes, "phrase merge passes");

    auto* model_cmd = app.add_subcommand("model", "model operations");
    auto* model_train = model_cmd->add_subcommand("train", "train the vector model");
    pa::TrainingConfig train_flags;
    bool train_flags_set[10] = {};
    auto tf = [&](const char* name, auto& slot, int idx, const char* help) {
        model_train->add_option_function<std::string>(
            name,
            [&slot, &train_flags_set, idx](const std::string& v) {
                using T = std::decay_t<decltype(slot)>;
                if constexpr (std::is_same_v<T, double>) slot = std::stod(v);
                else slot = static_cast<T>(std::stoull(v));
                train_flags_set[idx] = true;
            },
            help);
    };
    tf("--dim", train_flags.dim, 0, "vector dimension");
    tf("--window", train_flags.window, 1, "context window");
    tf("--negatives", train_flags.negatives, 2, "negative samples per pair");
    tf("--epochs", train_flags.epochs, 3, "training epochs");
    tf("--lr0", train_flags.lr0, 4, "initial learning rate");
    tf("--min-count", train_flags.min_count, 5, "vocabulary frequency floor");
    tf("--subsample", train_flags.subsample, 6, "subsampling threshold t (0 = off)");
    tf("--seed", train_flags.seed, 7, "RNG seed");
    tf("--workers", train_flags.workers, 8, "worker threads (1 = deterministic)");
    std::string model_out;
    model_train->add_option("--out", model_out, "output model path");

    auto* model_init = model_cmd->add_subcommand("init", "load a model and index stored documents");
    std::string model_path;
    model_init->add_option("path", model_path, "model file")->required();

    auto* search_cmd = app.add_subcommand("search", "rank analogs for a new patent file");
    std::string search_file;
    std::size_t search_k = 10;
    search_cmd->add_option("file", search_file, "plain-text query patent")->required();
    search_cmd->add_option("--k", search_k, "number of analogs");

    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP JSON API");
    std::string serve_addr;
    serve_cmd->add_option("--addr", serve_addr, "HOST:PORT");

    auto* functions_cmd = app.add_subcommand("functions", "composite-function registry");
    auto* functions_list = functions_cmd->add_subcommand("list", "list C_j definitions");
    auto* functions_exec = functions_cmd->add_subcommand("exec", "execute a function");
    std::string exec_id, exec_task_file;
    functions_exec->add_option("id", exec_id, "function id, e.g. C_7")->required();
    functions_exec->add_option("--task", exec_task_file, "JSON task envelope file");

    CLI11_PARSE(app, argc, argv);

    try {
        std::map<std::string, std::string> kv;
        if (!config_path.empty()) kv = pa::parse_config_file(config_path);
        for (const auto& [k, v] : overrides) kv[k] = v;
        auto cfg = pa::WorkstationConfig::from_map(kv);
        pa::Workstation ws(cfg);
        pa::Coordinator coordinator(pa::ServiceRegistry::make_default(), ws);

        if (*ingest_cmd) {
            for (const auto& file : ingest_files) {
                auto extracted = ingest_file(ws, file, ingest_encoding);
                std::cout << extracted.doc_id << "\t" << to_string(extracted.language) << "\t"
                          << extracted.text.size() << " chars\n";
            }
        } else if (*corpus_build) {
            pa::json task = pa::json::object();
            pa::json pc = pa::json::object();
            if (phrase_delta >= 0) pc["delta"] = phrase_delta;
            if (phrase_threshold >= 0) pc["threshold"] = phrase_threshold;
            if (phrase_passes >= 0) pc["max_passes"] = phrase_passes;
            if (!pc.empty()) task["phrase_config"] = pc;
            auto envelope = coordinator.execute_function("C_4", task);
            std::cout << envelope.at("result").dump(2) << "\n";
        } else if (*model_train) {
            pa::TrainingConfig tc = cfg.training;
            if (train_flags_set[0]) tc.dim = train_flags.dim;
            if (train_flags_set[1]) tc.window = train_flags.window;
            if (train_flags_set[2]) tc.negatives = train_flags.negatives;
            if (train_flags_set[3]) tc.epochs = train_flags.epochs;
            if (train_flags_set[4]) tc.lr0 = train_flags.lr0;
            if (train_flags_set[5]) tc.min_count = train_flags.min_count;
            if (train_flags_set[6]) tc.subsample = train_flags.subsample;
            if (train_flags_set[7]) tc.seed = train_flags.seed;
            if (train_flags_set[8]) tc.workers = train_flags.workers;
            auto corpus = ws.load_corpus();
            auto model = pa::train(corpus, tc);
            std::string out = model_out.empty() ? ws.default_model_path().string() : model_out;
            std::filesystem::create_directories(std::filesystem::path(out).parent_path());
            pa::save_model(model, out);
            std::cout << "model: " << out << " (" << model.size() << " terms, d=" << model.dim()
                      << ")\n";
        } else if (*model_init) {
            ws.set_model(pa::load_model(model_path));
            auto model = ws.model();
            std::size_t indexed = 0;
            for (const auto& id : ws.store().list(pa::kDocumentCollection)) {
                auto j = ws.store().get(pa::kDocumentCollection, id);
                pa::ExtractedText doc;
                doc.doc_id = j.at("doc_id").get<std::string>();
                doc.text = j.at("text").get<std::string>();
                doc.language = pa::language_from_string(j.value("language", "unknown"));
                pa::PatentMetadata meta{j.value("title", ""), j.value("ipc_class", "")};
                pa::index_patent(ws.store(), *model, doc, meta, ws.resources());
                ++indexed;
            }
            std::cout << "initialized " << model->size() << " terms (d=" << model->dim()
                      << "), indexed " << indexed << " patents\n";
        } else if (*search_cmd) {
            coordinator.ensure_model();
            coordinator.ensure_indexed();
            pa::RawDocument raw;
            raw.id = std::filesystem::path(search_file).stem().string();
            auto bytes = read_file(search_file);
            raw.payload.assign(bytes.begin(), bytes.end());
            auto query = pa::extract_text(raw);
            auto result =
                pa::search_analogs(ws.store(), *ws.model(), query, search_k, ws.resources());
            std::cout << result.to_json().dump(2) << "\n";
        } else if (*serve_cmd) {
            pa::ApiServer api(coordinator);
            auto [host, port] = split_addr(serve_addr.empty() ? cfg.listen_addr : serve_addr);
            std::cout << "listening on " << host << ":" << port << "\n";
            if (!api.listen(host, port)) {
                std::cerr << "failed to bind " << host << ":" << port << "\n";
                return 1;
            }
        } else if (*functions_list) {
            for (const auto& [fid, def] : coordinator.registry().functions()) {
                std::cout << fid << " = {";
                bool first = true;
                for (const auto& sid : def.services) {
                    std::cout << (first ? "" : ", ") << sid.name();
                    first = false;
                }
                std::cout << "} " << (def.executable ? "executable" : "not executable") << "\n";
            }
        } else if (*functions_exec) {
            pa::json task = pa::json::object();
            if (!exec_task_file.empty()) {
                task = pa::json::parse(read_file(exec_task_file), nullptr, false);
                if (task.is_discarded())
                    throw pa::Error(pa::ErrorCode::domain_error, "task file is not valid JSON");
            }
            std::cout << coordinator.execute_function(exec_id, task).dump(2) << "\n";
        }
        return 0;
    } catch (const pa::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
