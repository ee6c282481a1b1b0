#pragma once

#include <stdexcept>
#include <string>

namespace er {

// All fatal conditions in the library are reported through this type so the
// CLI can catch one thing, print `error: <what>` and exit nonzero.  The
// message should name the offending quantity and the violated requirement,
// e.g. "lambda(q=12) overflows int64 (lambda0=128, b=1.5)".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace er
