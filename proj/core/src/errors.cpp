#include "fcmarket/errors.hpp"

namespace fcmarket {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::schema: return "schema error";
    case ErrorCode::integrity: return "integrity error";
    case ErrorCode::range: return "range error";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::shape: return "shape error";
    case ErrorCode::numeric: return "numeric error";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::precondition: return "precondition error";
    case ErrorCode::degenerate: return "degenerate-feature error";
    case ErrorCode::filter: return "filter error";
    case ErrorCode::estimator: return "estimator error";
    case ErrorCode::tuning: return "tuning error";
    case ErrorCode::io: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace fcmarket
