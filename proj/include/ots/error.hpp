#pragma once

#include <stdexcept>
#include <string>

namespace ots {

enum class ErrorKind {
  ContractViolation,
  DegenerateAnnihilator,
  NoConvergence,
  OutOfWorkspace,
  InfeasibleCommand,
  UndefinedIndex,
  Trapped,
  ConventionValidation,
  Parse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ots
