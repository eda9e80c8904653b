#ifndef SEMKEY_ERRORS_H_
#define SEMKEY_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semkey {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A graph violates a structural invariant (bad index, duplicate edge, ...).
class MalformedGraphError : public Error {
 public:
  using Error::Error;
};

// Input text is not well formed. Line and column are 1-based; 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that does not follow the expected schema.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Two rows describe the same token differently.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Lexicon / embedding table rejected; line is 1-based.
class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Caller asked for something that cannot be done (empty corpus, bad flag).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace semkey

#endif  // SEMKEY_ERRORS_H_
