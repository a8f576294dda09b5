#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace evbayes {

// Domain and configuration failures surface as this type; the CLI turns it
// into an error JSON and a nonzero exit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

}  // namespace evbayes
