#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace archweave {

enum class ErrorKind {
  Syntax,          // rule text or model text is malformed
  Schema,          // element/edge kind not allowed where it was placed
  Conflict,        // merge would contradict an existing element
  NotFound,        // missing endpoint, diagram letter, catalog id
  PatternNotFound,
  NotExecutable,   // catalog stub
  Arity,           // more rename values than placeholders
  MatchFailure,
  NonTermination,
  Io,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::NotFound: return "not found";
    case ErrorKind::PatternNotFound: return "pattern not found";
    case ErrorKind::NotExecutable: return "not executable";
    case ErrorKind::Arity: return "arity error";
    case ErrorKind::MatchFailure: return "match failure";
    case ErrorKind::NonTermination: return "non-termination";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

/// Every failure in the library surfaces as this exception. Parse errors
/// carry the character offset (rule text) or line/column (model text).
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  Error(ErrorKind kind, std::string message, std::size_t offset)
      : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(offset) +
                           ": " + message),
        kind_(kind), offset_(offset) {}

  Error(ErrorKind kind, std::string message, std::size_t line, std::size_t column)
      : std::runtime_error(std::string(to_string(kind)) + " at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + message),
        kind_(kind), line_(line), column_(column) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

private:
  ErrorKind kind_;
  std::optional<std::size_t> offset_;
  std::optional<std::size_t> line_;
  std::optional<std::size_t> column_;
};

}  // namespace archweave
