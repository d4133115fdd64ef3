#pragma once

#include <stdexcept>
#include <string>

namespace qvote {

// Raised for any violated precondition on sizes, indices or protocol
// parameters. The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace qvote
