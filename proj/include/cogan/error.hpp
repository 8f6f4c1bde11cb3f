#pragma once

#include <stdexcept>
#include <string>

namespace cogan {

/// Runtime failure inside the pipeline (I/O, numerical breakdown, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something that violates a documented precondition.
/// The CLI maps this to exit code 1; every other failure maps to 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void fail(const std::string& message);
[[noreturn]] void reject(const std::string& message);

}  // namespace cogan
