#pragma once

#include <stdexcept>
#include <string>

namespace stagedtrees {

// The three failure classes map onto the CLI exit codes 1, 2 and 3.

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stagedtrees
