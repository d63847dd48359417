#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixncut::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kBadArguments = 1;
inline constexpr int kIoError = 2;
inline constexpr int kNoConvergence = 3;

/// args excludes the program name; args[0] is the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int cmd_segment(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);
int cmd_bench(const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err);

}  // namespace mixncut::cli
