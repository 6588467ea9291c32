#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bracketgeo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched jet dimension, bad index, insufficient jet order.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Elementary function or division evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Point at which the bracket, metric or embedding degenerates.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Operation requested on a structure that does not satisfy its preconditions.
class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

/// Field whose declared character (tangent / normal) does not hold.
class CharacterError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ParseErrorKind {
  Lexical,
  UnknownIdentifier,
  ArityMismatch,
  UnbalancedParentheses,
  UnexpectedToken,
  NonConstantExponent,
};

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what)
      : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

}  // namespace bracketgeo
