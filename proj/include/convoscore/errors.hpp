#ifndef CONVOSCORE_ERRORS_HPP
#define CONVOSCORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace convoscore {

// Malformed input: bad file contents, invalid parameter values, contract
// violations by the caller. The CLI maps this to exit code 3.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// An internal consistency check failed. Always a bug, never a data problem.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace convoscore

#endif
