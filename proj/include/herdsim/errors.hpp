#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace herdsim {

// All fatal errors identify the module and operation that raised them; the
// CLI maps any Error to a nonzero exit status.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string op, const std::string& message)
      : std::runtime_error("[" + module + "/" + op + "] " + message),
        module_(std::move(module)),
        op_(std::move(op)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& op() const noexcept { return op_; }

 private:
  std::string module_;
  std::string op_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace herdsim
