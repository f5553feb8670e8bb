#pragma once

#include <stdexcept>
#include <string>

namespace phasestar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: parse failures, unknown names, mismatched spaces.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t pos) : InputError(msg + " at offset " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

class SpaceMismatch : public InputError {
 public:
  using InputError::InputError;
};

// A history series did not reach a vanishing bracket within the order limit.
class NonTerminatingFlow : public Error {
 public:
  NonTerminatingFlow(const std::string& what, int order) : Error(what), order_(order) {}
  int order() const { return order_; }

 private:
  int order_;
};

// The distribution calculus cannot represent the requested result.
class NotClosed : public Error {
 public:
  using Error::Error;
};

class NumericalAbort : public Error {
 public:
  using Error::Error;
};

}  // namespace phasestar
