#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace debugta {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The host cannot do what was asked (compiler missing, sandbox setup failed).
// Never folded into a verdict.
class EnvironmentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// A model reply could not be interpreted (no JSON object, no code block, ...).
class MalformedModelOutput : public Error {
public:
    using Error::Error;
};

class AlignmentFailed : public Error {
public:
    using Error::Error;
};

// Transport-level gateway failure after the retry budget is spent.
class GatewayError : public Error {
public:
    GatewayError(const std::string& what, bool retryable)
        : Error(what), retryable_(retryable) {}
    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

class LoadError : public Error {
public:
    LoadError(std::filesystem::path path, const std::string& message)
        : Error(path.string() + ": " + message), path_(std::move(path)), message_(message) {}
    const std::filesystem::path& path() const noexcept { return path_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::filesystem::path path_;
    std::string message_;
};

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

}  // namespace debugta
