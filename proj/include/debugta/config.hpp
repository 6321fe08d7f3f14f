#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debugta/common.hpp"

namespace debugta {

/// Flat key/value configuration read from a TOML-style file:
///
///     run_workers = 4
///     [llm]
///     backend = "mock"
///     mock_script = "data/toy/mock.json"
///
/// Section headers prefix the following keys (`llm.backend`). Values are
/// quoted strings, numbers or true/false; `#` starts a comment outside
/// quotes. Every key has a built-in default (see `Config::defaults`), and
/// unknown keys are rejected. Environment variables `DEBUGTA_<KEY>` (upper
/// case, '.' replaced by '_') override file values.
class Config {
public:
    Config();

    static Config parse(std::string_view text, const std::string& origin = "<config>");
    static Config load(const std::filesystem::path& path);

    struct KeyInfo {
        std::string key;
        std::string default_value;
        std::string description;
    };
    static const std::vector<KeyInfo>& defaults();
    static std::string env_name(std::string_view key);

    /// Applies DEBUGTA_* overrides looked up through `getenv`-like `lookup`.
    void apply_env(const std::function<const char*(const char*)>& lookup);
    void apply_env();
    /// Merges another file over this one (used for `--backend cfg`).
    void merge(const Config& other);

    void set(const std::string& key, std::string value);
    std::string get(const std::string& key) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    /// Keys explicitly set (file, env or `set`), in contrast to defaults.
    const std::map<std::string, std::string>& overrides() const { return explicit_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> explicit_;
};

}  // namespace debugta
