#pragma once

#include <stdexcept>
#include <string>

namespace tweetslot {

// Exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kData = 3,
  kDivergence = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode code() const noexcept { return ExitCode::kData; }
};

// Bad or missing configuration (keys, ranges, paths).
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kConfig; }
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kData; }
};

// Non-finite loss or parameters during training.
class DivergenceError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kDivergence; }
};

}  // namespace tweetslot
