#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "patanalog/error.hpp"

namespace patanalog {

using json = nlohmann::json;

/// Directory-per-collection, one JSON file per document. Writes go
/// through a temp file and an atomic rename.
class DocumentStore {
public:
    explicit DocumentStore(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::create_directories(root_);
    }

    const std::filesystem::path& root() const noexcept { return root_; }

    void put(const std::string& collection, const std::string& id, const json& doc) {
        validate_collection(collection);
        validate_id(id);
        std::lock_guard lock(write_mutex_);
        auto dir = root_ / collection;
        std::filesystem::create_directories(dir);
        auto final_path = dir / (encode_id(id) + ".json");
        auto tmp_path = dir / (encode_id(id) + ".json.tmp");
        {
            std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
            if (!out) throw Error(ErrorCode::storage_corruption, "cannot open temp file for '" + id + "'");
            out << doc.dump(2) << '\n';
            out.flush();
            if (!out) throw Error(ErrorCode::storage_corruption, "short write for '" + id + "'");
        }
        std::filesystem::rename(tmp_path, final_path);
    }

    json get(const std::string& collection, const std::string& id) const {
        validate_collection(collection);
        auto path = root_ / collection / (encode_id(id) + ".json");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::not_found, "no document '" + id + "' in collection '" + collection + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        json doc = json::parse(buf.str(), nullptr, false);
        if (doc.is_discarded())
            throw Error(ErrorCode::storage_corruption, "document '" + id + "' is not valid JSON");
        return doc;
    }

    bool contains(const std::string& collection, const std::string& id) const {
        validate_collection(collection);
        return std::filesystem::exists(root_ / collection / (encode_id(id) + ".json"));
    }

    std::vector<std::string> list(const std::string& collection) const {
        validate_collection(collection);
        std::vector<std::string> ids;
        auto dir = root_ / collection;
        if (!std::filesystem::exists(dir)) return ids;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            auto name = entry.path().filename().string();
            if (name.size() > 5 && name.ends_with(".json"))
                ids.push_back(decode_id(name.substr(0, name.size() - 5)));
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    void remove(const std::string& collection, const std::string& id) {
        validate_collection(collection);
        std::lock_guard lock(write_mutex_);
        auto path = root_ / collection / (encode_id(id) + ".json");
        if (!std::filesystem::remove(path))
            throw Error(ErrorCode::not_found, "no document '" + id + "' in collection '" + collection + "'");
    }

private:
    static void validate_collection(const std::string& name) {
        static const std::regex pattern("^[a-z_]+$");
        if (!std::regex_match(name, pattern))
            throw Error(ErrorCode::domain_error, "collection name '" + name + "' must match [a-z_]+");
    }

    static void validate_id(const std::string& id) {
        if (id.empty()) throw Error(ErrorCode::domain_error, "document id must be non-empty");
    }

    // Percent-encodes bytes outside [A-Za-z0-9_-] so ids map to safe
    // file names bijectively.
    static std::string encode_id(const std::string& id) {
        static const char* hex = "0123456789ABCDEF";
        std::string out;
        out.reserve(id.size());
        for (unsigned char c : id) {
            if (std::isalnum(c) || c == '_' || c == '-') {
                out.push_back(static_cast<char>(c));
            } else {
                out.push_back('%');
                out.push_back(hex[c >> 4]);
                out.push_back(hex[c & 0xF]);
            }
        }
        return out;
    }

    static std::string decode_id(const std::string& name) {
        std::string out;
        out.reserve(name.size());
        for (std::size_t i = 0; i < name.size(); ++i) {
            if (name[i] == '%' && i + 2 < name.size()) {
                out.push_back(static_cast<char>(std::stoi(name.substr(i + 1, 2), nullptr, 16)));
                i += 2;
            } else {
                out.push_back(name[i]);
            }
        }
        return out;
    }

    std::filesystem::path root_;
    mutable std::mutex write_mutex_;
};

}  // namespace patanalog
