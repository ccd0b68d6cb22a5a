#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgav {

/// Broad failure families; the CLI maps each to an exit code.
enum class ErrorCategory { config, backend, data };

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::backend: return "backend";
    case ErrorCategory::data: return "data";
  }
  return "data";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

// ---- sparql -------------------------------------------------------------

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(ErrorCategory::data,
              "parse error at byte " + std::to_string(offset) + ": " + message),
        offset_(offset),
        message_(message) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(std::string name)
      : Error(ErrorCategory::data, "unbound variable ?" + name),
        name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// ---- transport ----------------------------------------------------------

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what)
      : Error(ErrorCategory::backend, what) {}
};

class EndpointError : public Error {
 public:
  EndpointError(int status, const std::string& what)
      : Error(ErrorCategory::backend,
              "endpoint returned HTTP " + std::to_string(status) + ": " + what),
        status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class MalformedResponse : public Error {
 public:
  explicit MalformedResponse(const std::string& what)
      : Error(ErrorCategory::backend, "malformed response: " + what) {}
};

class CacheCorrupt : public Error {
 public:
  explicit CacheCorrupt(const std::string& what)
      : Error(ErrorCategory::data, "cache entry corrupt: " + what) {}
};

// ---- dataset ------------------------------------------------------------

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class InsufficientRecords : public Error {
 public:
  explicit InsufficientRecords(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

// ---- classifier ---------------------------------------------------------

class DegenerateData : public Error {
 public:
  explicit DegenerateData(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class RemoteUnavailable : public Error {
 public:
  explicit RemoteUnavailable(const std::string& what)
      : Error(ErrorCategory::backend, what) {}
};

class RemoteProtocolError : public Error {
 public:
  explicit RemoteProtocolError(const std::string& what)
      : Error(ErrorCategory::backend, what) {}
};

// ---- evaluation ---------------------------------------------------------

class MismatchedQuestions : public Error {
 public:
  explicit MismatchedQuestions(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

}  // namespace kgav
