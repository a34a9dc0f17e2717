#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "problem.hpp"

namespace cdgakit::cli {

struct Options {
  std::optional<std::string> task;  // overrides the file's task
  std::optional<int> upto, cutoff;
  bool machine = false;
  bool verify = false;
};

/// Exit codes: 0 success, 1 a mathematical check failed, 2 bad input.
struct Outcome {
  int exit_code = 0;
  json report;  // {"version", "task", "result", "verdict", "meta"} or {"version", "error"}
  std::string human;
};

Outcome run_document(json doc, const Options& opt);
/// Parses then runs; never throws on bad input.
Outcome run_text(std::string_view text, const Options& opt);
std::string render(const Outcome& out, bool machine);

}  // namespace cdgakit::cli
