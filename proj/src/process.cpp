#include "lola/process.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include "lola/diag.hpp"

namespace lola {
namespace {

[[noreturn]] void internal(const std::string& message) {
    throw SpecError(ErrorKind::Internal, Span{0, 0}, message);
}

void set_nonblocking(int fd) {
    int flags = fcntl(fd, F_GETFL, 0);
    if (flags >= 0) fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

} // namespace

RunResult run_process(const std::vector<std::string>& argv, std::string_view stdin_data) {
    if (argv.empty()) internal("run_process: empty argv");

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
        internal("run_process: pipe() failed");
    }

    pid_t pid = fork();
    if (pid < 0) internal("run_process: fork() failed");

    if (pid == 0) {
        // Child: wire pipes to standard streams and exec.
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        std::fprintf(stderr, "run_process: cannot exec '%s': %s\n", args[0],
                     std::strerror(errno));
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);
    set_nonblocking(in_pipe[1]);
    set_nonblocking(out_pipe[0]);
    set_nonblocking(err_pipe[0]);

    // The child may exit before consuming all of stdin; ignore SIGPIPE while
    // feeding it.
    signal(SIGPIPE, SIG_IGN);

    RunResult result;
    std::size_t written = 0;
    bool stdin_open = true;
    bool out_open = true;
    bool err_open = true;
    if (stdin_data.empty()) {
        close(in_pipe[1]);
        stdin_open = false;
    }

    char buf[65536];
    while (out_open || err_open || stdin_open) {
        struct pollfd fds[3];
        int nfds = 0;
        int out_idx = -1, err_idx = -1, in_idx = -1;
        if (out_open) {
            fds[nfds] = {out_pipe[0], POLLIN, 0};
            out_idx = nfds++;
        }
        if (err_open) {
            fds[nfds] = {err_pipe[0], POLLIN, 0};
            err_idx = nfds++;
        }
        if (stdin_open) {
            fds[nfds] = {in_pipe[1], POLLOUT, 0};
            in_idx = nfds++;
        }
        int rc = poll(fds, static_cast<nfds_t>(nfds), -1);
        if (rc < 0) {
            if (errno == EINTR) continue;
            internal("run_process: poll() failed");
        }
        if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP | POLLERR)) != 0) {
            ssize_t n = read(out_pipe[0], buf, sizeof buf);
            if (n > 0) {
                result.out.append(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
                close(out_pipe[0]);
                out_open = false;
            }
        }
        if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP | POLLERR)) != 0) {
            ssize_t n = read(err_pipe[0], buf, sizeof buf);
            if (n > 0) {
                result.err.append(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
                close(err_pipe[0]);
                err_open = false;
            }
        }
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLHUP | POLLERR)) != 0) {
            ssize_t n = write(in_pipe[1], stdin_data.data() + written,
                              std::min<std::size_t>(stdin_data.size() - written, 65536));
            if (n > 0) {
                written += static_cast<std::size_t>(n);
            } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
                written = stdin_data.size(); // EPIPE: reader is gone
            }
            if (written >= stdin_data.size()) {
                close(in_pipe[1]);
                stdin_open = false;
            }
        }
    }

    int status = 0;
    struct rusage ru{};
    if (wait4(pid, &status, 0, &ru) < 0) internal("run_process: wait4() failed");
    result.max_rss_kb = ru.ru_maxrss;
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    } else {
        result.exit_code = -1;
    }
    return result;
}

RunResult run_shell(const std::string& command, std::string_view stdin_data) {
    return run_process({"/bin/sh", "-c", command}, stdin_data);
}

std::string make_temp_dir(const std::string& prefix) {
    const char* base = std::getenv("TMPDIR");
    std::string tmpl = std::string(base && *base ? base : "/tmp") + "/" + prefix + "XXXXXX";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) internal("make_temp_dir: mkdtemp() failed");
    return std::string(buf.data());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) internal("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) internal("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) internal("short write: " + path);
}

} // namespace lola
