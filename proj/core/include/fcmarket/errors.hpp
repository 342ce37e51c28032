#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fcmarket {

enum class ErrorCode {
  schema,        // missing column, unknown agent or feature reference
  integrity,     // timestamp gap, duplicate, missing value
  range,         // value or index outside the admissible range
  config,        // invalid configuration or policy parameters
  shape,         // matrix or row width mismatch
  numeric,       // non-finite input to a numerical routine
  domain,        // function evaluated outside its domain
  precondition,  // caller violated a documented precondition
  degenerate,    // constant feature or target where variation is required
  filter,        // partial-correlation filter cannot be evaluated
  estimator,     // gain estimator has no data to work with
  tuning,        // every cross-validation fold failed
  io             // file could not be read or written
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace fcmarket
