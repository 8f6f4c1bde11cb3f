#include "cogan/error.hpp"

namespace cogan {

void fail(const std::string& message) { throw Error(message); }

void reject(const std::string& message) { throw ValidationError(message); }

}  // namespace cogan
