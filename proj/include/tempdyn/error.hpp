#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tempdyn {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition the caller was responsible for did not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FetchError : public Error {
 public:
  FetchError(int status, const std::string& what)
      : Error(what), status_(status) {}
  // HTTP status, or 0 when no response was received.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class InterpolationError : public Error {
 public:
  enum class Kind { Boundary, ConsecutiveGap };
  InterpolationError(Kind kind, std::vector<std::size_t> positions,
                     const std::string& what)
      : Error(what), kind_(kind), positions_(std::move(positions)) {}
  Kind kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& positions() const noexcept {
    return positions_;
  }

 private:
  Kind kind_;
  std::vector<std::size_t> positions_;
};

// Contiguity gaps, MAX < MIN inversions and similar data problems.
class DataError : public Error {
 public:
  using Error::Error;
};

class SingularDesignError : public Error {
 public:
  explicit SingularDesignError(std::string column)
      : Error("design matrix is rank deficient: column '" + column +
              "' is linearly dependent on earlier columns"),
        column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class BandwidthError : public Error {
 public:
  using Error::Error;
};

class TestDegeneracyError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tempdyn
