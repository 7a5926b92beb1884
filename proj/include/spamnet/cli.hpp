#pragma once

#include <string>

namespace spamnet {

/// Entry point of the spamnet command-line tool.
/// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.
int run_cli(int argc, const char* const* argv);

struct CliInvocation {
    std::string command;
    std::string config_path;
    std::string data_path;
    std::string out_dir = ".";
    long seed_override = -1;  // <0 means not given
};

int run_command(const CliInvocation& inv);

}  // namespace spamnet
