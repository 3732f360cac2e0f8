#pragma once

#include <stdexcept>
#include <string>

namespace ucdf {

/// Position of a token or element in an input text: 1-based line/column plus length.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

inline std::string to_string(const SourceSpan& s) {
  return std::to_string(s.line) + ":" + std::to_string(s.column);
}

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Misuse of a builder API (unresolved endpoint, duplicate identifier, ...).
class BuildError : public Error {
 public:
  explicit BuildError(const std::string& msg) : Error(msg) {}
};

/// First syntax error in an input text. The parser stops at the first error.
class ParseError : public Error {
 public:
  SourceSpan span;
  std::string expected;
  std::string found;

  ParseError(SourceSpan sp, std::string exp, std::string got)
      : Error(to_string(sp) + ": expected " + exp + ", found " + got),
        span(sp),
        expected(std::move(exp)),
        found(std::move(got)) {}
};

}  // namespace ucdf
