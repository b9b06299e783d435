#pragma once

#include <stdexcept>
#include <string>

namespace ssa {

/// Malformed or inconsistent caller input: bad dimensions, out-of-range
/// parameters, unreadable or malformed files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a meaningful result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_input(const std::string& what) { throw InputError(what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail_input(what);
}

}  // namespace detail
}  // namespace ssa
