#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace blowup::cli {

enum class Status { ok, invalid_input, negative_decision, internal_limit };

// Exit code: 0 ok, 1 negative decision (only under --exit-status),
// 2 input or usage error, 3 search or enumeration guard.
int exit_code(Status status);

struct CommandResult {
  Status status = Status::ok;
  nlohmann::json payload;
  std::string text;  // help output; printed verbatim instead of payload
};

// args excludes the program name.
CommandResult run(const std::vector<std::string>& args);

// Byte-exact rendering of a result as written to standard output.
std::string render(const CommandResult& result);

}  // namespace blowup::cli
