#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <unistd.h>

#include "reformine/cli.hpp"

namespace {

// REFORMINE_COLOR in {auto, always, never}; auto colors only a terminal.
bool use_color() {
  const char* mode = std::getenv("REFORMINE_COLOR");
  if (mode != nullptr && std::strcmp(mode, "always") == 0) return true;
  if (mode != nullptr && std::strcmp(mode, "never") == 0) return false;
  return isatty(fileno(stderr)) != 0;
}

// Highlight the "error:" markers in a diagnostic block.
std::string colorize(const std::string& text) {
  static const std::string kNeedle = " error: ";
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t hit = text.find(kNeedle, pos);
    if (hit == std::string::npos) break;
    out.append(text, pos, hit - pos);
    out += " \x1b[1;31merror:\x1b[0m ";
    pos = hit + kNeedle.size();
  }
  out.append(text, pos, std::string::npos);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const reformine::cli::CommandOutcome outcome = reformine::cli::run(args);
  if (!outcome.out.empty()) {
    std::fwrite(outcome.out.data(), 1, outcome.out.size(), stdout);
  }
  if (!outcome.err.empty()) {
    const std::string err = use_color() ? colorize(outcome.err) : outcome.err;
    std::fwrite(err.data(), 1, err.size(), stderr);
  }
  return outcome.exit_code;
}
