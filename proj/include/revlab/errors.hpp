#pragma once

#include <stdexcept>
#include <string>

namespace revlab {

// Process exit codes shared by every subcommand.
enum class ExitCode : int {
  ok = 0,
  config = 2,
  io = 3,
  external_service = 4,
  data_invariant = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

struct ServiceError : Error {
  explicit ServiceError(const std::string& what) : Error(ExitCode::external_service, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ExitCode::data_invariant, what) {}
};

}  // namespace revlab
