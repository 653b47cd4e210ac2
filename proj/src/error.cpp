#include "illustrate/error.hpp"

namespace illustrate {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::lookup: return "lookup";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::allocation: return "allocation";
    case ErrorKind::size: return "size";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

}  // namespace illustrate
