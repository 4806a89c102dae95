// Flash-backed key/value parameter store, persisted as one JSON document per blimp.
#pragma once

#include <mochi/comms/protocol.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace mochi::comms {

class KeyNotFound : public std::out_of_range {
  public:
    explicit KeyNotFound(const std::string &key) : std::out_of_range("unknown parameter: " + key) {}
};

class StorageFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Keys are printable ASCII, at most 16 characters, namespaced like "ctl.k".
/// With a backing path, every set() is written through before it returns.
class ParamStore {
  public:
    ParamStore() = default;

    /// Opens (or creates on first write) the store at `path`; existing contents are loaded.
    explicit ParamStore(std::filesystem::path path) : path_(std::move(path)) { load(); }

    static std::filesystem::path robot_file(const std::filesystem::path &state_dir, int robot_id) {
        return state_dir / ("robot_" + std::to_string(robot_id) + ".json");
    }

    void set(const std::string &key, float value) {
        if (!valid_key(key)) {
            throw std::invalid_argument("invalid parameter key: '" + key + "'");
        }
        auto previous = values_.find(key);
        std::optional<float> old;
        if (previous != values_.end()) {
            old = previous->second;
        }
        values_[key] = value;
        try {
            persist();
        } catch (...) {
            if (old) {
                values_[key] = *old;
            } else {
                values_.erase(key);
            }
            throw;
        }
    }

    float get(const std::string &key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            throw KeyNotFound(key);
        }
        return it->second;
    }

    bool contains(const std::string &key) const { return values_.count(key) != 0; }
    const std::map<std::string, float> &values() const { return values_; }
    const std::filesystem::path &path() const { return path_; }

  private:
    void load() {
        if (path_.empty() || !std::filesystem::exists(path_)) {
            return;
        }
        std::ifstream in(path_);
        if (!in || !std::filesystem::is_regular_file(path_)) {
            throw StorageFailure("cannot read " + path_.string());
        }
        try {
            const nlohmann::json doc = nlohmann::json::parse(in);
            for (const auto &[key, value] : doc.at("params").items()) {
                values_[key] = value.get<float>();
            }
        } catch (const nlohmann::json::exception &e) {
            throw StorageFailure("corrupt parameter file " + path_.string() + ": " + e.what());
        }
    }

    void persist() const {
        if (path_.empty()) {
            return;
        }
        nlohmann::json doc;
        doc["params"] = nlohmann::json::object();
        for (const auto &[key, value] : values_) {
            doc["params"][key] = value;
        }
        std::error_code ec;
        if (path_.has_parent_path()) {
            std::filesystem::create_directories(path_.parent_path(), ec);
        }
        const std::filesystem::path tmp = path_.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            out << doc.dump(2) << '\n';
            out.flush();
            if (!out) {
                throw StorageFailure("cannot write " + tmp.string());
            }
        }
        std::filesystem::rename(tmp, path_, ec);
        if (ec) {
            throw StorageFailure("cannot replace " + path_.string() + ": " + ec.message());
        }
    }

    std::filesystem::path path_;
    std::map<std::string, float> values_;
};

} // namespace mochi::comms
