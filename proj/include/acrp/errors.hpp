#pragma once

#include <stdexcept>
#include <string>

namespace acrp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two aircraft are already closer than the separation norm at t = 0.
class InitialLossOfSeparation : public Error {
 public:
  InitialLossOfSeparation(int i, int j, double distance, double d);
  int i() const { return i_; }
  int j() const { return j_; }

 private:
  int i_;
  int j_;
};

class DegenerateControl : public Error {
 public:
  using Error::Error;
};

class MissingFLData : public Error {
 public:
  using Error::Error;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class UnknownPair : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace acrp
