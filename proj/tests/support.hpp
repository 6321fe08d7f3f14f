#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "debugta/corpus.hpp"
#include "debugta/judge.hpp"
#include "debugta/llm.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return DEBUGTA_DATA_DIR; }
inline std::filesystem::path toy_root() { return data_dir() / "toy"; }
inline std::filesystem::path toy_mock() { return toy_root() / "mock.json"; }

/// One judge per test binary: compiled artifacts are cached across tests.
inline debugta::judge::Judge& shared_judge() {
    static debugta::judge::Judge judge;
    return judge;
}

/// The toy corpus, loaded once without pool verification (verification is
/// covered by its own tests).
inline const debugta::corpus::Dataset& toy() {
    static const debugta::corpus::Dataset ds = debugta::corpus::load_dataset(toy_root());
    return ds;
}

inline const debugta::corpus::Submission& submission(const std::string& problem, const std::string& id) {
    for (const auto& s : toy().at(problem).submissions) {
        if (s.id == id) return s;
    }
    throw std::runtime_error("no submission " + problem + "/" + id);
}

inline const debugta::corpus::PoolEntry& pool_entry(const std::string& problem, const std::string& id) {
    for (const auto& e : toy().at(problem).pool) {
        if (e.id == id) return e;
    }
    throw std::runtime_error("no pool entry " + problem + "/" + id);
}

inline debugta::llm::Gateway mock_gateway(const std::filesystem::path& script,
                                          std::shared_ptr<debugta::llm::Ledger> ledger = nullptr) {
    return debugta::llm::Gateway(
        std::make_shared<debugta::llm::MockBackend>(debugta::llm::MockBackend::from_file(script)), {},
        std::move(ledger));
}

inline debugta::llm::Gateway mock_gateway(const debugta::json& script,
                                          std::shared_ptr<debugta::llm::Ledger> ledger = nullptr) {
    return debugta::llm::Gateway(
        std::make_shared<debugta::llm::MockBackend>(debugta::llm::MockBackend::from_json(script)), {},
        std::move(ledger));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "debugta-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
