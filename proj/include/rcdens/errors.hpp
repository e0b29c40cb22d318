#pragma once

#include <stdexcept>
#include <string>

namespace rcdens {

//! Base class for all errors raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Observations that cannot be used (non-finite, malformed rows, ...).
class InvalidDataError : public Error
{
public:
  using Error::Error;
};

//! A numeric parameter is outside its admissible range.
class ParameterError : public Error
{
public:
  using Error::Error;
};

//! Too few observations for the requested operation.
class SampleSizeError : public Error
{
public:
  using Error::Error;
};

//! Tuning rules are only defined for design tail exponents beta > 1.
class UnsupportedRegimeError : public Error
{
public:
  using Error::Error;
};

//! Not enough points to fit a rate.
class InsufficientDataError : public Error
{
public:
  using Error::Error;
};

} // namespace rcdens
