#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mpcta::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kNumeric = 3,
};

/// Runs one command line (args[0] is the program name). Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1,2,5..7" -> {1, 2, 5, 6, 7}. Throws std::invalid_argument on bad input.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace mpcta::cli
