#pragma once

#include <stdexcept>
#include <string>

namespace palms {

/// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kUsage,      ///< invalid configuration or arguments
  kData,       ///< ingestion, split population, malformed pool
  kNumerical,  ///< solver non-convergence and other numerical failures
  kState,      ///< operation not allowed in the current session state
  kNotFound,   ///< unknown session or resource
  kConflict,   ///< stale or mismatched request (e.g. wrong pending id)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& m) : Error(ErrorKind::kUsage, m) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& m) : Error(ErrorKind::kData, m) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& m) : Error(ErrorKind::kNumerical, m) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& m) : Error(ErrorKind::kState, m) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& m) : Error(ErrorKind::kNotFound, m) {}
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& m) : Error(ErrorKind::kConflict, m) {}
};

/// 0 success, 1 usage, 2 data, 3 numerical/solver.
int exit_code_for(ErrorKind kind) noexcept;

const char* to_string(ErrorKind kind) noexcept;

}  // namespace palms
