#pragma once

#include <stdexcept>
#include <string>

namespace gubm {

// Exit-code mapping used by the CLI: usage errors are raised by the flag
// parser itself; these two cover everything underneath.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gubm
