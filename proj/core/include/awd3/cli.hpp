#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace awd3 {

/// Entry point behind the awd3lab binary. Subcommands: train, bias-scan,
/// verify, eval. Returns the process exit code: 0 success, 1 I/O or runtime
/// failure, 2 usage or configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char** argv);

} // namespace awd3
