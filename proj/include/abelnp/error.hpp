#pragma once

#include <stdexcept>
#include <string>

namespace abelnp {

// Malformed spec files, bad flags, violated preconditions on user input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumeration budget or p-adic precision ran out.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematical invariant that must hold did not: non-integral coefficient,
// non-vanishing guard term, Newton polygon below Hodge, and so on.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

inline void ensure(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

}  // namespace abelnp
