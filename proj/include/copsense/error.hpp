#pragma once

#include <stdexcept>
#include <string>

namespace copsense {

enum class ErrorCode {
  InvalidArgument,   // malformed input (dimensions, indices, flags)
  DomainError,       // model violation (assumption broken, wrong mode, non-PSD Q, ...)
  IoError,           // file / parse problems
  Numerical,         // solver could not certify its contract
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace copsense
