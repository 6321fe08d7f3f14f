#include "debugta/sandbox.hpp"

#include <fcntl.h>
#include <linux/audit.h>
#include <linux/filter.h>
#include <linux/seccomp.h>
#include <sched.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <climits>
#include <csignal>
#include <cstddef>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "debugta/common.hpp"

extern char** environ;

namespace debugta::judge {

namespace fs = std::filesystem;

namespace {

#if defined(__x86_64__)
constexpr std::uint32_t kAuditArch = AUDIT_ARCH_X86_64;
#elif defined(__aarch64__)
constexpr std::uint32_t kAuditArch = AUDIT_ARCH_AARCH64;
#else
#error "seccomp filter: unsupported architecture"
#endif

// Denied syscalls fail with EPERM. clone is allowed only with CLONE_THREAD;
// clone3 fails with ENOSYS so libc falls back to clone.
constexpr int kDenied[] = {
    SYS_socket, SYS_socketpair, SYS_connect, SYS_bind, SYS_listen, SYS_accept, SYS_accept4,
#ifdef SYS_fork
    SYS_fork,
#endif
#ifdef SYS_vfork
    SYS_vfork,
#endif
    SYS_ptrace,
};

void install_seccomp_or_die() {
    constexpr std::size_t n = std::size(kDenied);
    sock_filter prog[4 + 2 * n + 7];
    std::size_t k = 0;
    prog[k++] = BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, arch));
    prog[k++] = BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, kAuditArch, 1, 0);
    prog[k++] = BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_KILL_PROCESS);
    prog[k++] = BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, nr));
    for (int nr : kDenied) {
        prog[k++] = BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, static_cast<std::uint32_t>(nr), 0, 1);
        prog[k++] = BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ERRNO | (EPERM & SECCOMP_RET_DATA));
    }
#ifdef SYS_clone3
    prog[k++] = BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, static_cast<std::uint32_t>(SYS_clone3), 0, 1);
    prog[k++] = BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ERRNO | (ENOSYS & SECCOMP_RET_DATA));
#endif
    prog[k++] = BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, static_cast<std::uint32_t>(SYS_clone), 0, 3);
    prog[k++] = BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, args[0]));  // low word of flags
    prog[k++] = BPF_JUMP(BPF_JMP | BPF_JSET | BPF_K, CLONE_THREAD, 1, 0);
    prog[k++] = BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ERRNO | (EPERM & SECCOMP_RET_DATA));
    prog[k++] = BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ALLOW);
    sock_fprog fprog{static_cast<unsigned short>(k), prog};
    if (prctl(PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0) != 0) _exit(126);
    if (prctl(PR_SET_SECCOMP, SECCOMP_MODE_FILTER, &fprog) != 0) _exit(126);
}

void set_limit(int resource, std::uint64_t value) {
    rlimit rl{static_cast<rlim_t>(value), static_cast<rlim_t>(value)};
    if (setrlimit(resource, &rl) != 0) _exit(126);
}

// Reports errno from the child to the parent and exits. Only async-signal-safe calls.
[[noreturn]] void child_fail(int fd, int err) {
    (void)!write(fd, &err, sizeof err);
    _exit(127);
}

int open_or_fail(int report_fd, const char* path, int flags) {
    int fd = open(path, flags, 0644);
    if (fd < 0) child_fail(report_fd, errno);
    return fd;
}

std::vector<std::string> child_environment() {
    std::vector<std::string> env;
    for (char** e = environ; e && *e; ++e) {
        std::string_view kv(*e);
        if (kv.starts_with("LC_ALL=") || kv.starts_with("LANG=") || kv.starts_with("LANGUAGE=")) {
            continue;
        }
        env.emplace_back(kv);
    }
    env.emplace_back("LC_ALL=C");
    env.emplace_back("LANG=C");
    return env;
}

std::vector<char*> c_array(std::vector<std::string>& strings) {
    std::vector<char*> out;
    out.reserve(strings.size() + 1);
    for (auto& s : strings) out.push_back(s.data());
    out.push_back(nullptr);
    return out;
}

}  // namespace

std::optional<fs::path> find_executable(const std::string& name) {
    if (name.empty()) return std::nullopt;
    if (name.find('/') != std::string::npos) {
        if (access(name.c_str(), X_OK) == 0) return fs::path(name);
        return std::nullopt;
    }
    const char* path_env = std::getenv("PATH");
    std::string path = path_env ? path_env : "/usr/local/bin:/usr/bin:/bin";
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) dir = ".";
        const fs::path candidate = fs::path(dir) / name;
        if (access(candidate.c_str(), X_OK) == 0 && !fs::is_directory(candidate)) return candidate;
    }
    return std::nullopt;
}

ProcessOutcome run_process(const ProcessSpec& spec) {
    if (spec.argv.empty()) throw EnvironmentError("run_process: empty argv");
    const auto exe = find_executable(spec.argv.front());
    if (!exe) throw EnvironmentError("executable not found: " + spec.argv.front());

    // Everything the child touches is prepared before fork.
    std::vector<std::string> argv_storage = spec.argv;
    std::vector<std::string> env_storage = child_environment();
    auto argv = c_array(argv_storage);
    auto envp = c_array(env_storage);
    const std::string exe_path = exe->string();
    const std::string cwd = spec.cwd.string();
    const std::string in_path = spec.stdin_path.empty() ? "/dev/null" : spec.stdin_path.string();
    const std::string out_path = spec.stdout_path.empty() ? "/dev/null" : spec.stdout_path.string();
    const std::string err_path = spec.stderr_path.empty() ? "/dev/null" : spec.stderr_path.string();

    int report[2];
    if (pipe2(report, O_CLOEXEC) != 0) throw EnvironmentError("pipe2 failed: " + std::string(std::strerror(errno)));

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = fork();
    if (pid < 0) {
        close(report[0]);
        close(report[1]);
        throw EnvironmentError("fork failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        close(report[0]);
        setpgid(0, 0);
        if (!cwd.empty() && chdir(cwd.c_str()) != 0) child_fail(report[1], errno);
        const int in = open_or_fail(report[1], in_path.c_str(), O_RDONLY);
        const int out = open_or_fail(report[1], out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC);
        const int err = open_or_fail(report[1], err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC);
        if (dup2(in, 0) < 0 || dup2(out, 1) < 0 || dup2(err, 2) < 0) child_fail(report[1], errno);
        close(in);
        close(out);
        close(err);
        if (spec.address_space_bytes) set_limit(RLIMIT_AS, *spec.address_space_bytes);
        if (spec.stack_bytes) set_limit(RLIMIT_STACK, *spec.stack_bytes);
        if (spec.cpu_seconds) set_limit(RLIMIT_CPU, *spec.cpu_seconds);
        if (spec.file_size_bytes) set_limit(RLIMIT_FSIZE, *spec.file_size_bytes);
        if (spec.open_files) set_limit(RLIMIT_NOFILE, *spec.open_files);
        if (spec.deny_network_and_fork) install_seccomp_or_die();
        execve(exe_path.c_str(), argv.data(), envp.data());
        child_fail(report[1], errno);
    }
    close(report[1]);
    int child_errno = 0;
    const auto got = read(report[0], &child_errno, sizeof child_errno);
    close(report[0]);

    ProcessOutcome outcome;
    int status = 0;
    rusage usage{};
    if (got == static_cast<ssize_t>(sizeof child_errno)) {
        wait4(pid, &status, 0, &usage);
        throw EnvironmentError("cannot start " + exe_path + ": " + std::strerror(child_errno));
    }

    auto sleep_for = std::chrono::microseconds(500);
    while (true) {
        const pid_t r = wait4(pid, &status, WNOHANG, &usage);
        if (r == pid) break;
        if (r < 0 && errno != EINTR) throw EnvironmentError("wait4 failed: " + std::string(std::strerror(errno)));
        const auto elapsed = std::chrono::steady_clock::now() - start;
        if (spec.wall_limit_ms > 0 && elapsed > std::chrono::milliseconds(spec.wall_limit_ms)) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            while (wait4(pid, &status, 0, &usage) < 0 && errno == EINTR) {
            }
            outcome.wall_timeout = true;
            break;
        }
        std::this_thread::sleep_for(sleep_for);
        sleep_for = std::min(sleep_for * 2, std::chrono::microseconds(5000));
    }
    outcome.wall_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                           std::chrono::steady_clock::now() - start)
                                           .count());
    outcome.max_rss_kb = usage.ru_maxrss;
    if (WIFEXITED(status)) {
        outcome.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        outcome.term_signal = WTERMSIG(status);
    }
    return outcome;
}

RlimitSandbox::RlimitSandbox(fs::path scratch_root) : scratch_root_(std::move(scratch_root)) {
    fs::create_directories(scratch_root_);
}

RunOutcome RlimitSandbox::run(const fs::path& binary, const std::string& input,
                              const RunLimits& limits) {
    std::string tmpl = (scratch_root_ / "run-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) {
        throw EnvironmentError("sandbox setup failed: mkdtemp: " + std::string(std::strerror(errno)));
    }
    const fs::path dir(tmpl);
    struct Cleanup {
        fs::path dir;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } cleanup{dir};

    write_file(dir / "input.txt", input);
    const auto mem_bytes = static_cast<std::uint64_t>(limits.memory_limit_kb) * 1024;

    ProcessSpec spec;
    spec.argv = {fs::absolute(binary).string()};
    spec.cwd = dir;
    spec.stdin_path = dir / "input.txt";
    spec.stdout_path = dir / "output.txt";
    spec.stderr_path = dir / "stderr.txt";
    spec.wall_limit_ms = limits.time_limit_ms;
    // Headroom for the loader and libstdc++ mappings; the RSS check below is
    // what decides MLE.
    spec.address_space_bytes = mem_bytes + (64ull << 20);
    spec.stack_bytes = mem_bytes;
    spec.cpu_seconds = static_cast<std::uint64_t>(limits.time_limit_ms / 1000 + 2);
    spec.file_size_bytes = 64ull << 20;
    spec.open_files = 64;
    spec.deny_network_and_fork = true;

    RunOutcome out;
    out.process = run_process(spec);
    std::error_code ec;
    if (fs::exists(spec.stdout_path, ec)) out.stdout_data = read_file(spec.stdout_path);
    if (fs::exists(spec.stderr_path, ec)) {
        out.stderr_head = read_file(spec.stderr_path).substr(0, 4096);
    }
    return out;
}

}  // namespace debugta::judge
