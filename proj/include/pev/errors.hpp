#pragma once

#include <stdexcept>
#include <string>

namespace pev {

// Raised when a computation hits a numerical dead end (singular or
// ill-conditioned moment matrices, collinear designs). Distinct from
// std::invalid_argument, which signals a violated precondition.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pev
