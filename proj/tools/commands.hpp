#pragma once

#include <cstdint>
#include <string>

#include "problem.hpp"

namespace shm::cli {

enum ExitCode : int { kOk = 0, kParseError = 2, kNotConverged = 3, kVerificationFailed = 4 };

struct CommandOptions {
  double rel_tol = 1e-4;
  std::uint64_t seed = 0;
  int restarts = 64;
  double epsilon = 1e-3;
};

struct CommandResult {
  Json report;
  int exit_code = kOk;
};

/// Runs `command` on the problem text. Throws ParseError for unreadable or
/// unsuitable input; everything else ends up in the report.
CommandResult run_command(const std::string& command, const std::string& problem_text,
                          const CommandOptions& options, const std::string& input_digest = "");

bool known_command(const std::string& command);

}  // namespace shm::cli
