#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lola {

struct RunResult {
    int exit_code = 0;     // process exit status; 128+signal when killed by a signal
    std::string out;       // captured stdout
    std::string err;       // captured stderr
    long max_rss_kb = 0;   // peak resident set size (Linux: kilobytes)
};

/// Run a program with the given argv, feeding `stdin_data` and capturing both
/// output streams. Throws SpecError{Internal} if the process cannot be
/// spawned.
RunResult run_process(const std::vector<std::string>& argv, std::string_view stdin_data);

/// Run a shell command line via `sh -c`.
RunResult run_shell(const std::string& command, std::string_view stdin_data = {});

/// Create a fresh temporary directory (under TMPDIR or /tmp).
std::string make_temp_dir(const std::string& prefix);

/// Read a whole file; throws SpecError{Internal} when it cannot be opened.
std::string read_file(const std::string& path);

/// Write a whole file; throws SpecError{Internal} on failure.
void write_file(const std::string& path, std::string_view content);

} // namespace lola
