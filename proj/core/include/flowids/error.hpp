#pragma once

#include <stdexcept>
#include <string>

namespace flowids {

// Single exception type for contract violations and bad input across the
// library. The message is a one-line diagnostic suitable for CLI output.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace flowids
