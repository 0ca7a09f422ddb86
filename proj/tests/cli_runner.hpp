#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli_test {

/// Runs the wavecast executable with `args`; stdout and stderr go to `log`.
inline int run(const std::string& args, const std::filesystem::path& log)
{
    const std::string cmd = std::string("\"") + WAVECAST_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) {
        return -1;
    }
    return WEXITSTATUS(status);
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh empty directory under the test build tree.
inline std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::path(WAVECAST_SCRATCH) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::size_t count_files(const std::filesystem::path& dir)
{
    std::size_t n = 0;
    if (std::filesystem::exists(dir)) {
        for (const auto& e : std::filesystem::directory_iterator(dir)) {
            n += e.is_regular_file();
        }
    }
    return n;
}

} // namespace cli_test
