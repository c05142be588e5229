#pragma once

#include <stdexcept>
#include <string>

namespace srhgnn {

/// Process exit codes shared by the library error types and the CLI.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kData = 2,
  kNumerical = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Bad configuration or command-line usage.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ExitCode::kUsage, what) {}
};

/// Malformed or inconsistent input data (files, index ranges, duplicates).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

/// NaN/Inf or divergence.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ExitCode::kNumerical, what) {}
};

/// A caller broke an operation's precondition (shape mismatch, non-edge query).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what)
      : Error(ExitCode::kUsage, what) {}
};

}  // namespace srhgnn
