#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace debtbugs {

/// Error categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  Usage = 1,
  Data = 2,
  Precondition = 3,
  Io = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// A caller broke an operation's precondition (wrong lengths, too few rows, ...).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateIdError : public DataError {
 public:
  DuplicateIdError(std::int64_t bug_id, std::size_t first_line, std::size_t second_line);
  std::int64_t bug_id() const noexcept { return bug_id_; }
  std::size_t first_line() const noexcept { return first_line_; }
  std::size_t second_line() const noexcept { return second_line_; }

 private:
  std::int64_t bug_id_;
  std::size_t first_line_;
  std::size_t second_line_;
};

/// duplicate_of links that loop back on themselves; no master exists.
class CycleError : public DataError {
 public:
  explicit CycleError(std::vector<std::int64_t> cycle);
  const std::vector<std::int64_t>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::int64_t> cycle_;
};

class InsufficientDataError : public ContractError {
 public:
  using ContractError::ContractError;
};

class UndefinedCorrelationError : public DataError {
 public:
  using DataError::DataError;
};

class SingularFitError : public DataError {
 public:
  using DataError::DataError;
};

class DivergenceError : public DataError {
 public:
  using DataError::DataError;
};

class ModelLoadError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace debtbugs
