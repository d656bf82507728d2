#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace cvid {

// All precondition and invariant failures surface as cvid::Error. The CLI
// turns these into machine-readable error records; tests assert on them.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

}  // namespace cvid

#define CVID_CHECK(cond, msg)             \
  do {                                    \
    if (!(cond)) {                        \
      std::ostringstream cvid_oss_;       \
      cvid_oss_ << msg;                   \
      ::cvid::fail(cvid_oss_.str());      \
    }                                     \
  } while (0)
