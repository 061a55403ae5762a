#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tgp {

/// Broad failure classes. The CLI maps each to a distinct exit status.
enum class ErrorCategory {
  config,
  data,
  transport,
  auth,
  protocol,
  format,
  precondition,
  interrupted,
};

std::string_view to_string(ErrorCategory category);

/// Process exit status used by the CLI for a failure of this category.
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};

class AuthError : public Error {
 public:
  explicit AuthError(const std::string& m) : Error(ErrorCategory::auth, m) {}
};

/// Transient failures exhausted the retry budget (or the connection failed).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& m)
      : Error(ErrorCategory::transport, m) {}
};

/// The endpoint answered with something we cannot use.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& m)
      : Error(ErrorCategory::protocol, m) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& m) : Error(ErrorCategory::format, m) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& m)
      : Error(ErrorCategory::precondition, m) {}
};

class PoolTooSmall : public PreconditionError {
 public:
  PoolTooSmall(std::size_t pool, std::size_t k);
};

class EmptyGradients : public PreconditionError {
 public:
  EmptyGradients() : PreconditionError("prompt has no accumulated gradients") {}
};

class RuleMismatch : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class EmptyInput : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Candidate prompt exceeded the configured length cap.
class PromptTooLong : public PreconditionError {
 public:
  PromptTooLong(std::size_t length, std::size_t cap);
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCategory::data, m) {}
};

/// Malformed JSON on a given 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed JSON that violates a dataset invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::size_t line, const std::string& reason);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SpecUnsatisfiable : public Error {
 public:
  explicit SpecUnsatisfiable(const std::string& m)
      : Error(ErrorCategory::config, m) {}
};

/// Deliberate abort of a run (test harness or operator interrupt).
class Interrupted : public Error {
 public:
  explicit Interrupted(const std::string& m)
      : Error(ErrorCategory::interrupted, m) {}
};

/// A failure attributed to one benchmark item. Keeps the cause's category.
class ItemError : public Error {
 public:
  ItemError(std::string item_id, const Error& cause);
  const std::string& item_id() const noexcept { return item_id_; }

 private:
  std::string item_id_;
};

/// Failures a per-item pipeline may absorb (graded incorrect, or recorded as
/// an item error) without aborting the whole run.
bool is_recoverable(ErrorCategory category);

}  // namespace tgp
