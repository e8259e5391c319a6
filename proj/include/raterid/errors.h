#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace raterid {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A line of an input file could not be split into the expected fields.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& message);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A value lies outside its admissible range (rating, timestamp, bin).
class RangeError : public Error {
 public:
  using Error::Error;
};

// A record has the wrong shape, e.g. a household with one member.
class StructureError : public Error {
 public:
  using Error::Error;
};

// A key that must be unique appeared twice.
class DuplicateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A weekday profile was requested for a user without training events.
class UndefinedProfileError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments to a numerical routine (labels, dimensions).
class InputError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace raterid
