#pragma once

#include <stdexcept>
#include <string>

namespace illustrate {

enum class ErrorKind {
  usage,       // bad configuration or arguments
  io,          // file missing or unreadable
  parse,       // schema / format violation
  dimension,   // shape mismatch between declared and actual sizes
  lookup,      // unknown id
  empty_input,
  integrity,   // duplicate ids, broken cross references
  numeric,     // NaN / inf, singular systems
  allocation,  // budgets that cannot be reconciled
  size,        // instance too large for exhaustive search
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace illustrate
