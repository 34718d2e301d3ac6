#include "trijunc/errors.hpp"

namespace trijunc {

Error::Error(std::string kind, std::string module, std::string op, const std::string& message)
    : std::runtime_error(module + "::" + op + ": " + message),
      kind_(std::move(kind)),
      module_(std::move(module)),
      op_(std::move(op)),
      message_(message) {}

}  // namespace trijunc
