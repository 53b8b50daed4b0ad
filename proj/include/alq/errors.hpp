#pragma once

#include <stdexcept>
#include <string>

namespace alq {

enum class ErrorKind {
  Dimension,
  Parameter,
  Weight,
  Controllability,
  Step,
  Window,
  Trace,
  Config,
  Io,
  Overflow,
  Singularity,
  Instability,
  Numeric,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

  // 1 for validation/usage style failures, 2 for numeric ones.
  int exit_code() const;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg);

}  // namespace alq
