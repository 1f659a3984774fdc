#pragma once

#include <stdexcept>
#include <string>

namespace conceptcut {

// Malformed input data (files, identifiers, structure). The CLI maps this to
// exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter outside its documented range. The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace conceptcut
