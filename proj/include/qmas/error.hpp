#pragma once

#include <stdexcept>
#include <string>

namespace qmas {

enum class ErrorCode {
  duplicate_edge,
  self_loop,
  disconnected,
  too_few_agents,
  invalid_scale,
  dimension_mismatch,
  unbounded_cell,
  agent_set_mismatch,
  numerical_divergence,
  degenerate_bound,
  invalid_argument,
  invalid_config,
};

const char* to_string(ErrorCode code);

/// Library-wide exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qmas
