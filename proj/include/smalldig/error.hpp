#pragma once

#include <stdexcept>
#include <string>

namespace smalldig {

// Bad parameters: out-of-domain values, malformed rationals, mismatched sizes.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A configured enumeration or scan budget would be exceeded.
class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A certified comparison could not be decided at the working precision.
class Indeterminate : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail_invalid(const std::string& what) { throw InvalidArgument(what); }
[[noreturn]] inline void fail_budget(const std::string& what) { throw BudgetExceeded(what); }

inline void require(bool cond, const char* what)
{
  if (!cond)
    fail_invalid(what);
}

} // namespace smalldig
