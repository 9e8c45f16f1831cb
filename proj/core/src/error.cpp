#include "palms/error.hpp"

namespace palms {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kUsage:
      return 1;
    case ErrorKind::kData:
    case ErrorKind::kNotFound:
      return 2;
    case ErrorKind::kNumerical:
      return 3;
    case ErrorKind::kState:
    case ErrorKind::kConflict:
      return 1;
  }
  return 1;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kUsage:
      return "usage_error";
    case ErrorKind::kData:
      return "data_error";
    case ErrorKind::kNumerical:
      return "solver_error";
    case ErrorKind::kState:
      return "state_error";
    case ErrorKind::kNotFound:
      return "not_found";
    case ErrorKind::kConflict:
      return "conflict";
  }
  return "error";
}

}  // namespace palms
