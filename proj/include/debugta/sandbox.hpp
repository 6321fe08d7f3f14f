#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace debugta::judge {

struct ProcessSpec {
    std::vector<std::string> argv;  // argv[0] resolved through PATH
    std::filesystem::path cwd;
    std::filesystem::path stdin_path;  // empty: /dev/null
    std::filesystem::path stdout_path;
    std::filesystem::path stderr_path;
    int wall_limit_ms = 0;  // 0: unlimited
    std::optional<std::uint64_t> address_space_bytes;
    std::optional<std::uint64_t> stack_bytes;
    std::optional<std::uint64_t> cpu_seconds;
    std::optional<std::uint64_t> file_size_bytes;
    std::optional<std::uint64_t> open_files;
    bool deny_network_and_fork = false;  // seccomp filter
};

struct ProcessOutcome {
    bool wall_timeout = false;
    int exit_code = -1;    // valid when term_signal == 0
    int term_signal = 0;
    long max_rss_kb = 0;
    int wall_ms = 0;
};

/// Finds an executable by name on PATH (or verifies an explicit path).
std::optional<std::filesystem::path> find_executable(const std::string& name);

/// Runs one process to completion. Throws EnvironmentError when the process
/// cannot be started (fork/exec failure, unreadable stdin, ...).
ProcessOutcome run_process(const ProcessSpec& spec);

struct RunLimits {
    int time_limit_ms = 2000;
    int memory_limit_kb = 262144;
};

struct RunOutcome {
    ProcessOutcome process;
    std::string stdout_data;
    std::string stderr_head;  // first few KiB
};

/// Execution seam for judged programs. The contract: wall-clock and memory
/// caps enforced, no network, working directory confined to a fresh temp dir.
class Sandbox {
public:
    virtual ~Sandbox() = default;
    virtual RunOutcome run(const std::filesystem::path& binary, const std::string& input,
                           const RunLimits& limits) = 0;
};

/// fork/exec with setrlimit, a seccomp denylist and a wall-clock watchdog.
class RlimitSandbox final : public Sandbox {
public:
    explicit RlimitSandbox(std::filesystem::path scratch_root);
    RunOutcome run(const std::filesystem::path& binary, const std::string& input,
                   const RunLimits& limits) override;

private:
    std::filesystem::path scratch_root_;
};

}  // namespace debugta::judge
