#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lyra {

/// Broad failure classes. The CLI maps each one onto a process exit code.
enum class ErrorCategory {
  usage,
  parse,
  validation,
  io,
  config,
  transport,
  service,
  protocol,
  empty_output,
  internal,
};

std::string_view to_string(ErrorCategory category) noexcept;

/// Exit code contract of the command-line tool: 2 usage, 3 validation,
/// 4 transport, 5 internal.
int exit_code_for(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message)
      : Error(ErrorCategory::parse, message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorCategory::validation, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::io, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::config, message) {}
};

/// Connection refused, timeout, reset. Retryable.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts)
      : Error(ErrorCategory::transport, message), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// Non-success HTTP status. Retryable only for 5xx.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string body_excerpt, int attempts = 1)
      : Error(ErrorCategory::service,
              "service returned HTTP " + std::to_string(status) + ": " + body_excerpt),
        status_(status),
        body_excerpt_(std::move(body_excerpt)),
        attempts_(attempts) {}

  int status() const noexcept { return status_; }
  const std::string& body_excerpt() const noexcept { return body_excerpt_; }
  int attempts() const noexcept { return attempts_; }
  bool retryable() const noexcept { return status_ >= 500; }

 private:
  int status_;
  std::string body_excerpt_;
  int attempts_;
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& message)
      : Error(ErrorCategory::protocol, message) {}
};

class EmptyOutputError : public Error {
 public:
  explicit EmptyOutputError(const std::string& message)
      : Error(ErrorCategory::empty_output, message) {}
};

}  // namespace lyra
