#pragma once

#include <stdexcept>
#include <string>

namespace redsense {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input was readable but violates the documented format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its domain (bad k, empty input, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace redsense
