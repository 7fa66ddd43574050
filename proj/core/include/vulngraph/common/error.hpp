#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vulngraph {

/// Base class for every error the toolkit raises. The CLI maps each
/// subclass to a categorized exit message.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ShapeMismatchError : public Error {
 public:
  ShapeMismatchError(const std::string& context, const std::string& expected,
                     const std::string& got)
      : Error(context + ": expected shape " + expected + ", got " + got) {}
};

/// Raised when an op is evaluated outside its domain (log of a
/// non-positive value and the like).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// Source position + what the parser wanted to see there.
class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& expected)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": expected " + expected),
        line_(line),
        col_(col),
        expected_(expected) {}

  explicit ParseError(const std::string& what)
      : Error("parse error: " + what), line_(0), col_(0), expected_(what) {}

  ParseError(const std::string& what, int line, int col)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": " + what),
        line_(line),
        col_(col),
        expected_(what) {}

  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_;
  int col_;
  std::string expected_;
};

class ProviderUnavailableError : public Error {
 public:
  explicit ProviderUnavailableError(const std::string& what) : Error(what) {}
};

class MissingEmbeddingError : public Error {
 public:
  explicit MissingEmbeddingError(const std::string& sample_id)
      : Error("no cached embedding for sample " + sample_id) {}
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(std::size_t expected, std::size_t got)
      : Error("embedding width changed mid-run: first saw " +
              std::to_string(expected) + ", now " + std::to_string(got)) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class LabelMissingError : public Error {
 public:
  explicit LabelMissingError(const std::string& path)
      : Error("no label for file " + path) {}
};

class EmptyCorpusError : public Error {
 public:
  explicit EmptyCorpusError(const std::string& what) : Error(what) {}
};

}  // namespace vulngraph
