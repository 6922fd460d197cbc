#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gbc/regression_tree.hpp"

namespace gbc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kIo = 4,
  kModelVersion = 5,
};

// Parses "f:t;f:t;..." into one split per iteration. Throws ConfigError.
std::vector<ForcedSplit> parse_forced_splits(const std::string& text);

// Entry point for the `gbc` tool: subcommands train, predict and trace.
// Data goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gbc::cli
