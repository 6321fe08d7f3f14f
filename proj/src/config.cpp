#include "debugta/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

namespace debugta {

const std::vector<Config::KeyInfo>& Config::defaults() {
    static const std::vector<KeyInfo> keys = {
        {"compiler_cmd", "g++ -O2 -std=c++17", "compiler command; the source path is appended"},
        {"compile_timeout_ms", "30000", "wall limit for one compilation"},
        {"run_workers", "4", "concurrent compilations and test executions"},
        {"tokenizer", "lexical", "retrieval tokenizer: lexical or bpe"},
        {"bpe_vocab", "", "vocab.json for tokenizer=bpe"},
        {"bpe_merges", "", "merges.txt for tokenizer=bpe"},
        {"bm25_k1", "1.2", "BM25 term saturation"},
        {"bm25_b", "0.75", "BM25 length normalization"},
        {"dataset", "", "default dataset root"},
        {"corpus.verify_pools", "true", "compile and run every pool entry at load time"},
        {"corpus.window_hours", "24", "same-submitter exclusion window for the pool"},
        {"llm.backend", "http", "teacher backend: http or mock"},
        {"llm.base_url", "https://api.openai.com/v1", "chat-completions endpoint root"},
        {"llm.model", "gpt-4o-mini", "teacher model"},
        {"llm.timeout_ms", "60000", "per-request timeout"},
        {"llm.max_inflight", "4", "concurrent requests per backend"},
        {"llm.transport_retries", "3", "retries of transient transport failures"},
        {"llm.json_reasks", "2", "re-asks when a reply cannot be parsed"},
        {"llm.mock_script", "", "mock script for llm.backend=mock"},
        {"student.backend", "", "StuBot backend (empty: same as llm.backend)"},
        {"student.base_url", "", "StuBot endpoint (empty: llm.base_url)"},
        {"student.model", "gpt-4o-mini", "StuBot model"},
        {"student.mock_script", "", "StuBot mock script (empty: llm.mock_script)"},
        {"align.max_retries", "2", "fresh mapping requests after a failed verification"},
        {"align.skip_jaccard", "0.8", "skip alignment at or above this identifier overlap"},
        {"agent.max_snippet_lines", "3", "longest verbatim reference block allowed in a suggestion"},
        {"plag.tau_sim", "0.8", "similarity threshold"},
        {"plag.tau_diff", "0.1", "difference margin"},
        {"session.max_rounds", "3", "teaching rounds per session"},
        {"session.early_stop", "true", "stop a session once all tests pass"},
        {"eval.workers", "2", "concurrent sessions"},
        {"eval.runs_dir", "runs", "output root for eval runs"},
        {"serve.host", "127.0.0.1", "bind address"},
        {"serve.port", "8080", "listen port"},
        {"serve.data_dir", "serve-data", "live session storage"},
        {"serve.round_cap", "10", "maximum submissions per live session"},
        {"serve.static_dir", "", "directory served under / (web UI build)"},
        {"serve.token", "", "bearer token required on /api when non-empty"},
    };
    return keys;
}

Config::Config() {
    for (const auto& k : defaults()) values_[k.key] = k.default_value;
}

std::string Config::env_name(std::string_view key) {
    std::string out = "DEBUGTA_";
    for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string parse_value(std::string_view raw, const std::string& where) {
    if (raw.empty()) throw ConfigError(where + ": missing value");
    if (raw.front() != '"') {
        const auto hash = raw.find('#');
        auto v = trim(raw.substr(0, hash));
        if (v.empty()) throw ConfigError(where + ": missing value");
        return v;
    }
    std::string out;
    std::size_t i = 1;
    for (; i < raw.size() && raw[i] != '"'; ++i) {
        if (raw[i] == '\\' && i + 1 < raw.size()) {
            const char n = raw[++i];
            out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
        } else {
            out += raw[i];
        }
    }
    if (i >= raw.size()) throw ConfigError(where + ": unterminated string");
    const auto rest = trim(raw.substr(i + 1));
    if (!rest.empty() && rest.front() != '#') throw ConfigError(where + ": trailing characters after value");
    return out;
}

bool known_key(const std::string& key) {
    const auto& d = Config::defaults();
    return std::any_of(d.begin(), d.end(), [&](const Config::KeyInfo& k) { return k.key == key; });
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& origin) {
    Config c;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        const auto where = origin + ":" + std::to_string(line_no);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            const auto close = line.find(']');
            if (close == std::string::npos) throw ConfigError(where + ": malformed section header");
            section = trim(std::string_view(line).substr(1, close - 1));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        auto key = trim(std::string_view(line).substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        if (!known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        c.set(key, parse_value(trim(std::string_view(line).substr(eq + 1)), where));
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    return parse(read_file(path), path.string());
}

void Config::apply_env(const std::function<const char*(const char*)>& lookup) {
    for (const auto& k : defaults()) {
        if (const char* v = lookup(env_name(k.key).c_str())) set(k.key, v);
    }
}

void Config::apply_env() {
    apply_env([](const char* name) { return std::getenv(name); });
}

void Config::merge(const Config& other) {
    for (const auto& [k, v] : other.explicit_) set(k, v);
}

void Config::set(const std::string& key, std::string value) {
    if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
    explicit_[key] = std::move(value);
}

std::string Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

int Config::get_int(const std::string& key) const {
    const auto v = get(key);
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

double Config::get_double(const std::string& key) const {
    const auto v = get(key);
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

bool Config::get_bool(const std::string& key) const {
    const auto v = get(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

}  // namespace debugta
