#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anchormatch {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitIo = 3,
    kExitParse = 4,
    kExitDigest = 5,
    kExitInvalid = 6,
    kExitMismatch = 7,
};

/// Entry point of the command-line tool; args[0] is the program name.
int run_commands(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anchormatch
