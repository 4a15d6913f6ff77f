#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcn {

/// Base class for every error raised by the simulator library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoSuchChannel : public Error {
 public:
  using Error::Error;
};

class BrokenPath : public Error {
 public:
  using Error::Error;
};

class InsufficientBalance : public Error {
 public:
  InsufficientBalance(std::size_t hop, const std::string& what) : Error(what), hop_(hop) {}

  /// Index of the first hop (0-based) that could not carry the amount.
  std::size_t hop() const noexcept { return hop_; }

 private:
  std::size_t hop_;
};

class NotAGateway : public Error {
 public:
  using Error::Error;
};

class ZeroOutbound : public Error {
 public:
  using Error::Error;
};

class EmptyNetwork : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class GenerationExhausted : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownKey : public Error {
 public:
  using Error::Error;
};

}  // namespace pcn
