#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jscc::cli {

// Runs one command-line invocation. `args` excludes the program name and is
// in natural order. Results go to `out`, diagnostics to `err`. Returns the
// process exit code: 0 on success, 2 for invalid usage or malformed input,
// 3 when a computation fails to meet its numeric certificate.
int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err);

}  // namespace jscc::cli
