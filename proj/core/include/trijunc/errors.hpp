#pragma once

#include <stdexcept>
#include <string>

namespace trijunc {

// Base error carrying the module and operation that raised it.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, std::string module, std::string op, const std::string& message);

  const std::string& kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& op() const noexcept { return op_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string kind_;
  std::string module_;
  std::string op_;
  std::string message_;
};

#define TRIJUNC_DECLARE_ERROR(Name, Kind)                                       \
  class Name : public Error {                                                  \
   public:                                                                     \
    Name(std::string module, std::string op, const std::string& message)       \
        : Error(Kind, std::move(module), std::move(op), message) {}            \
  };

TRIJUNC_DECLARE_ERROR(ParseError, "parse")
TRIJUNC_DECLARE_ERROR(ValidationError, "validation")
TRIJUNC_DECLARE_ERROR(DomainError, "domain")
TRIJUNC_DECLARE_ERROR(ConvergenceError, "convergence")
TRIJUNC_DECLARE_ERROR(DegenerateError, "degenerate")
TRIJUNC_DECLARE_ERROR(SizeError, "size")

#undef TRIJUNC_DECLARE_ERROR

}  // namespace trijunc
