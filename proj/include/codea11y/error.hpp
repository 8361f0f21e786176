#pragma once

#include <stdexcept>
#include <string>

namespace codea11y {

enum class ErrorKind {
  invalid_input,
  invalid_cursor,
  io_error,
  prompt_too_large,
  empty_prompt,
  agent_unavailable,
  queue_full,
  score_error,
  empty_report,
  config_error,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "InvalidInput";
    case ErrorKind::invalid_cursor: return "InvalidCursor";
    case ErrorKind::io_error: return "IoError";
    case ErrorKind::prompt_too_large: return "PromptTooLarge";
    case ErrorKind::empty_prompt: return "EmptyPrompt";
    case ErrorKind::agent_unavailable: return "AgentUnavailable";
    case ErrorKind::queue_full: return "QueueFull";
    case ErrorKind::score_error: return "ScoreError";
    case ErrorKind::empty_report: return "EmptyReport";
    case ErrorKind::config_error: return "ConfigError";
  }
  return "Unknown";
}

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a model client call fails. `retriable` distinguishes
/// transient failures (timeouts, 5xx) from permanent ones.
class AgentUnavailable : public Error {
 public:
  AgentUnavailable(const std::string& message, bool retriable)
      : Error(ErrorKind::agent_unavailable, message), retriable_(retriable) {}

  bool retriable() const noexcept { return retriable_; }

 private:
  bool retriable_;
};

}  // namespace codea11y
