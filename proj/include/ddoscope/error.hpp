#pragma once

#include <stdexcept>
#include <string>

namespace ddoscope {

// Exit-code mapping used by the CLI: ConfigError -> 2, DataError -> 3,
// InvariantError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddoscope
