#pragma once

#include <string>
#include <vector>

namespace reformine::cli {

// The observable result of one command invocation.
//
// exit_code: 0 on success, 1 on a domain error (unreadable or invalid
// input, grounding or solving failure), 2 on a usage error (unknown
// subcommand or flag, missing required argument).
//
// out carries the machine-readable payload (canonical text, JSON, CSV,
// DOT); err carries diagnostics only, formatted
// "file:line:col: error: message" with the position parts omitted when
// unknown.
struct CommandOutcome {
  int exit_code = 0;
  std::string out;
  std::string err;
};

// Execute one command given its arguments (without the program name).
// Never throws; failures are reported through the outcome.
CommandOutcome run(const std::vector<std::string>& args);

}  // namespace reformine::cli
